// Explorer entry point.  With ?fixtures=1 (or when served from a file)
// the app runs entirely from recorded documents; otherwise it talks to
// the job service at the same origin.

import { awaitJob, FixtureBackend, HttpBackend, type Backend } from "./api.js";
import { ExplorerSession } from "./session.js";
import { renderBPPView } from "./views/bpp_view.js";
import { renderCompareTray, type PinnedDesign } from "./views/compare_tray.js";
import { renderOCView } from "./views/oc_view.js";
import { parseQuantiles, renderPriorPanel } from "./views/prior_panel.js";
import type {
  BPPDocument,
  PriorDensityResponse,
  SweepDocument,
  UtilityWeights,
} from "./types.js";

interface AppState {
  session: ExplorerSession;
  backend: Backend;
  density: PriorDensityResponse | null;
  sweep: { doc: SweepDocument; hash: string } | null;
  sweepNoDelay: { doc: SweepDocument; hash: string } | null;
  bpp: { doc: BPPDocument; hash: string } | null;
  sensitivity: boolean;
  upper: number;
  lower: number;
  pinned: PinnedDesign[];
  weights: UtilityWeights;
  quantileError: string | null;
}

async function makeBackend(): Promise<Backend> {
  const params = new URLSearchParams(location.search);
  if (params.get("fixtures") === "1" || location.protocol === "file:") {
    const load = async (name: string) =>
      (await fetch(`fixtures/${name}.json`)).json();
    return new FixtureBackend({
      sweep: await load("sweep"),
      sweepNoDelay: await load("sweep_no_delay"),
      bpp: await load("bpp"),
      priorDensity: await load("prior_density"),
    });
  }
  return new HttpBackend("");
}

function render(state: AppState): void {
  const root = document.getElementById("app")!;
  const active = state.sensitivity ? state.sweepNoDelay : state.sweep;
  const ocHtml = renderOCView(active?.doc ?? null, {
    sensitivity: state.sensitivity,
    stale: active
      ? state.session.isStale(active.hash, state.sensitivity ? { p_dte: 0 } : {})
      : false,
  });
  const bppHtml = renderBPPView(
    state.bpp?.doc ?? null,
    state.upper,
    state.lower,
    state.bpp ? state.session.isStale(state.bpp.hash) : false,
  );
  root.innerHTML =
    renderPriorPanel(state.session.priors, state.density, state.quantileError) +
    `<section class="panel actions">
       <button id="run-sweep">Run operating characteristics</button>
       <button id="run-bpp">Run predictive probability</button>
       <progress id="job-progress" max="1" value="0"></progress>
     </section>` +
    ocHtml +
    bppHtml +
    renderCompareTray(state.pinned, state.weights);
  wire(state);
}

function readNumber(id: string, fallback: number): number {
  const el = document.getElementById(id) as HTMLInputElement | null;
  const v = el ? Number(el.value) : NaN;
  return isFinite(v) ? v : fallback;
}

function syncForms(state: AppState): void {
  const p = state.session.priors;
  p.p_separate = readNumber("p-separate", p.p_separate);
  p.p_dte = readNumber("p-dte", p.p_dte);
  p.hr_shape = readNumber("hr-shape", p.hr_shape);
  p.hr_rate = readNumber("hr-rate", p.hr_rate);
  p.delay_shape = readNumber("delay-shape", p.delay_shape);
  p.delay_rate = readNumber("delay-rate", p.delay_rate);
  p.control_rate_per_month = readNumber("control-rate", p.control_rate_per_month);
  p.control_shape = readNumber("control-shape", p.control_shape);
  const quantiles = (document.getElementById("hr-quantiles") as HTMLInputElement | null)?.value ?? "";
  state.quantileError = quantiles.trim() ? parseQuantiles(quantiles).error ?? null : null;
}

function wire(state: AppState): void {
  const progress = document.getElementById("job-progress") as HTMLProgressElement | null;

  for (const id of [
    "p-separate", "p-dte", "hr-shape", "hr-rate", "delay-shape", "delay-rate",
    "control-rate", "control-shape", "hr-quantiles",
  ]) {
    document.getElementById(id)?.addEventListener("change", async () => {
      syncForms(state);
      try {
        state.density = await state.backend.priorDensity(
          (state.session.buildConfig() as any).priors,
        );
      } catch {
        state.density = null;
      }
      render(state);
    });
  }

  document.getElementById("run-sweep")?.addEventListener("click", async () => {
    syncForms(state);
    const run = async (overrides: { p_dte?: number }) => {
      const config = state.session.buildConfig(overrides);
      const hash = state.session.currentHash(overrides);
      const jobId = await state.backend.submit("sweep", config);
      const doc = await awaitJob<SweepDocument>(state.backend, jobId, (f) => {
        if (progress) progress.value = f;
      });
      state.session.store(hash, doc);
      return { doc, hash };
    };
    state.sweep = await run({});
    state.sweepNoDelay = await run({ p_dte: 0 });
    render(state);
  });

  document.getElementById("run-bpp")?.addEventListener("click", async () => {
    syncForms(state);
    const config = state.session.buildConfig();
    const hash = state.session.currentHash();
    const jobId = await state.backend.submit("bpp", config);
    const doc = await awaitJob<BPPDocument>(state.backend, jobId, (f) => {
      if (progress) progress.value = f;
    });
    state.session.store(hash, doc);
    state.bpp = { doc, hash };
    render(state);
  });

  document.getElementById("sensitivity-toggle")?.addEventListener("change", (ev) => {
    state.sensitivity = (ev.target as HTMLInputElement).checked;
    render(state);
  });

  for (const id of ["bpp-upper", "bpp-lower"]) {
    document.getElementById(id)?.addEventListener("input", () => {
      state.upper = readNumber("bpp-upper", state.upper);
      state.lower = readNumber("bpp-lower", state.lower);
      render(state);
    });
  }

  document.querySelectorAll("input.weight").forEach((input) => {
    input.addEventListener("change", () => {
      const key = (input as HTMLInputElement).dataset.weight as keyof UtilityWeights;
      state.weights[key] = Number((input as HTMLInputElement).value) || 0;
      render(state);
    });
  });

  document.querySelectorAll(".oc-table tbody tr").forEach((row, i) => {
    row.addEventListener("click", () => {
      const active = state.sensitivity ? state.sweepNoDelay : state.sweep;
      if (!active) return;
      const entry = active.doc.results[i];
      const label = entry.interim_fraction === null
        ? "no interim"
        : `interim @ ${entry.interim_fraction}`;
      if (!state.pinned.some((p) => p.label === label)) {
        state.pinned.push({ label, entry });
        render(state);
      }
    });
  });
}

async function start(): Promise<void> {
  const backend = await makeBackend();
  const state: AppState = {
    session: new ExplorerSession(),
    backend,
    density: null,
    sweep: null,
    sweepNoDelay: null,
    bpp: null,
    sensitivity: false,
    upper: 0.95,
    lower: 0.05,
    pinned: [],
    weights: { assurance: 1, duration: 0, sample_size: 0, futility_incorrect: 0 },
    quantileError: null,
  };
  try {
    state.density = await backend.priorDensity(
      (state.session.buildConfig() as any).priors,
    );
  } catch {
    state.density = null;
  }
  render(state);
}

start();
