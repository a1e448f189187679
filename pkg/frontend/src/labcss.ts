import type { LabEntry } from "./types.js";

// Presentation-only CIELab -> sRGB (D65) for swatches and tint strips;
// scores and proportions always come from the API untouched.
export function labToCss(c: LabEntry): string {
  const fy = (c.L + 16) / 116;
  const fx = fy + c.a / 500;
  const fz = fy - c.b / 200;
  const f3 = (f: number) => {
    const t = f ** 3;
    return t > 0.008856 ? t : (f - 16 / 116) / 7.787;
  };
  const x = f3(fx) * 0.95047;
  const y = f3(fy) * 1.0;
  const z = f3(fz) * 1.08883;
  const lin = [
    3.2404542 * x - 1.5371385 * y - 0.4985314 * z,
    -0.969266 * x + 1.8760108 * y + 0.041556 * z,
    0.0556434 * x - 0.2040259 * y + 1.0572252 * z,
  ];
  const channel = (v: number) => {
    const g = v <= 0.0031308 ? 12.92 * v : 1.055 * Math.max(v, 0) ** (1 / 2.4) - 0.055;
    return Math.max(0, Math.min(255, Math.round(g * 255)));
  };
  const [r, g, b] = lin.map(channel);
  return `rgb(${r}, ${g}, ${b})`;
}
