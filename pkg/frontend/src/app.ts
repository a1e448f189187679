import { ApiClient } from "./api.js";
import { defaultForm, serializeForm, validateForm } from "./form.js";
import { JobView } from "./jobview.js";
import { labToCss } from "./labcss.js";
import { renderFrontSvg } from "./scatter.js";
import type { ConventionEntry, JobForm } from "./types.js";

const client = new ApiClient("");
const form: JobForm = defaultForm();
let view: JobView | null = null;
let imageFile: File | null = null;
let demFile: File | null = null;
let sidecarFile: File | null = null;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function readFormInputs(): void {
  form.mode = ($("mode") as HTMLSelectElement).value as JobForm["mode"];
  form.zones = Number(($("zones") as HTMLInputElement).value);
  form.k = Number(($("k") as HTMLSelectElement).value);
  form.t = Number(($("t") as HTMLSelectElement).value);
  form.gamma = Number(($("gamma") as HTMLInputElement).value);
  form.alpha = Number(($("alpha") as HTMLInputElement).value);
  form.aerial = ($("aerial") as HTMLInputElement).checked;
  form.seed = Number(($("seed") as HTMLInputElement).value);
  form.grid_size = Number(($("grid-size") as HTMLInputElement).value);
  form.delta_min = Number(($("delta-min") as HTMLInputElement).value);
  form.conventions = readConventions();
}

function readConventions(): ConventionEntry[] {
  const rows = document.querySelectorAll<HTMLElement>("#conventions .convention-row");
  const entries: ConventionEntry[] = [];
  rows.forEach((row) => {
    const zone = Number((row.querySelector(".conv-zone") as HTMLInputElement).value);
    const L = Number((row.querySelector(".conv-L") as HTMLInputElement).value);
    const a = Number((row.querySelector(".conv-a") as HTMLInputElement).value);
    const b = Number((row.querySelector(".conv-b") as HTMLInputElement).value);
    if (!Number.isNaN(zone)) entries.push({ zone, L, a, b });
  });
  return entries;
}

function showErrors(errors: Record<string, string>): void {
  const box = $("form-errors");
  box.textContent = Object.entries(errors)
    .map(([field, msg]) => `${field}: ${msg}`)
    .join("; ");
  box.classList.toggle("hidden", Object.keys(errors).length === 0);
}

function banner(text: string, kind: "info" | "error"): void {
  const el = $("banner");
  el.textContent = text;
  el.className = kind;
  el.classList.remove("hidden");
}

async function showDominants(file: File): Promise<void> {
  try {
    const payload = await client.analyze(file);
    const strip = $("dominants");
    strip.innerHTML = "";
    for (const d of payload.grid.dominants) {
      const sw = document.createElement("div");
      sw.className = "swatch";
      sw.style.background = labToCss(d);
      sw.style.flexGrow = String(Math.max(d.proportion, 0.02));
      sw.title = `${(d.proportion * 100).toFixed(1)}%`;
      strip.appendChild(sw);
    }
  } catch (err) {
    banner(`analyze failed: ${err}`, "error");
  }
}

function drawFront(): void {
  if (!view) return;
  $("scatter").innerHTML = renderFrontSvg(
    view.points,
    view.selection?.index ?? null,
    view.midpointIndex,
  );
}

function drawComparePanel(): void {
  const panel = $("compare");
  if (!view?.selection) {
    panel.classList.add("hidden");
    return;
  }
  panel.classList.remove("hidden");
  ($("preview") as HTMLImageElement).src = view.selection.previewUrl;
  const strip = $("tint-strip");
  strip.innerHTML = "";
  for (const color of view.selection.scheme.colors) {
    const sw = document.createElement("div");
    sw.className = "swatch";
    sw.style.background = labToCss(color);
    strip.appendChild(sw);
  }
  const { F_s, F_a } = view.selection.scheme;
  $("selection-scores").textContent = `solution ${view.selection.index}: F_s=${F_s.toFixed(3)} F_a=${F_a.toFixed(3)}`;
}

async function selectSolution(index: number): Promise<void> {
  if (!view) return;
  try {
    await view.select(index);
    drawFront();
    drawComparePanel();
  } catch (err) {
    banner(`selection failed: ${err}`, "error");
  }
}

async function submit(): Promise<void> {
  readFormInputs();
  const errors = validateForm(form);
  if (!imageFile) errors.image = "choose a reference image";
  if (!demFile) errors.dem = "choose a DEM";
  showErrors(errors);
  if (Object.keys(errors).length > 0) return;

  view?.stop();
  try {
    const id = await client.submitJob(imageFile!, demFile!, serializeForm(form), sidecarFile ?? undefined);
    banner(`job ${id} submitted`, "info");
    $("job-id").textContent = id;
    view = new JobView(id, client);
    const payload = await view.poll((p) => {
      $("job-status").textContent = p.status;
    });
    if (payload.status === "failed") {
      banner(`job failed: ${payload.error}`, "error");
      return;
    }
    drawFront();
    drawComparePanel();
    if (view.midpointIndex !== null) {
      await selectSolution(view.midpointIndex);
    }
  } catch (err) {
    banner(`${err}`, "error");
  }
}

function exportScheme(): void {
  if (!view?.selection) return;
  const raw = view.exportScheme();
  const blob = new Blob([raw], { type: "application/json" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = `scheme-${view.id}-${view.selection.index}.json`;
  a.click();
  URL.revokeObjectURL(a.href);
}

function addConventionRow(): void {
  const row = document.createElement("div");
  row.className = "convention-row";
  row.innerHTML =
    `<input class="conv-zone" type="number" min="1" value="1" title="zone"/>` +
    `<input class="conv-L" type="number" value="55" title="L"/>` +
    `<input class="conv-a" type="number" value="-40" title="a"/>` +
    `<input class="conv-b" type="number" value="30" title="b"/>` +
    `<button type="button" class="conv-remove">x</button>`;
  (row.querySelector(".conv-remove") as HTMLButtonElement).onclick = () => row.remove();
  $("conventions").appendChild(row);
}

export function wireUp(): void {
  ($("image-input") as HTMLInputElement).addEventListener("change", (e) => {
    imageFile = (e.target as HTMLInputElement).files?.[0] ?? null;
    if (imageFile) {
      ($("reference") as HTMLImageElement).src = URL.createObjectURL(imageFile);
      void showDominants(imageFile);
    }
  });
  ($("dem-input") as HTMLInputElement).addEventListener("change", (e) => {
    demFile = (e.target as HTMLInputElement).files?.[0] ?? null;
  });
  ($("sidecar-input") as HTMLInputElement).addEventListener("change", (e) => {
    sidecarFile = (e.target as HTMLInputElement).files?.[0] ?? null;
  });
  $("submit").addEventListener("click", () => void submit());
  $("export").addEventListener("click", exportScheme);
  $("add-convention").addEventListener("click", addConventionRow);
  $("scatter").addEventListener("click", (e) => {
    const target = (e.target as Element).closest("[data-index]");
    if (target) void selectSolution(Number(target.getAttribute("data-index")));
  });
}

if (typeof document !== "undefined" && document.getElementById("submit")) {
  wireUp();
}
