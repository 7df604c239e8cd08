/**
 * Browser bootstrap: wires the form, presets, job cards and pinned
 * comparison to the DOM. All rendering goes through the pure builders in
 * view.ts; this file only moves strings into elements.
 */

import { ServiceClient } from "./api.js";
import {
  applyPreset,
  canSubmit,
  defaultForm,
  fieldErrors,
  formConfig,
  PRESETS,
  type ScenarioFormState,
} from "./form.js";
import { runScenario, stageLine } from "./jobs.js";
import { makePin, PinStore } from "./pins.js";
import { esc } from "./svg.js";
import type { SitesDoc } from "./types.js";
import { errorCardHtml, screenView } from "./view.js";

interface Elements {
  root: Document;
  byId<T extends HTMLElement>(id: string): T;
}

function elements(root: Document): Elements {
  return {
    root,
    byId<T extends HTMLElement>(id: string): T {
      const node = root.getElementById(id);
      if (!node) throw new Error(`missing #${id} in the page shell`);
      return node as T;
    },
  };
}

function readForm(els: Elements): ScenarioFormState {
  return {
    supplyScale: els.byId<HTMLInputElement>("supply-scale").value,
    traderFloor: els.byId<HTMLInputElement>("trader-floor").value,
    clustering: els.byId<HTMLInputElement>("clustering").checked,
    supplyMode: els.byId<HTMLSelectElement>("supply-mode").value,
    solver: els.byId<HTMLSelectElement>("solver").value,
    seed: els.byId<HTMLInputElement>("seed").value,
    highVolumeThreshold: els.byId<HTMLInputElement>("high-volume-threshold").value,
  };
}

function writeForm(els: Elements, form: ScenarioFormState): void {
  els.byId<HTMLInputElement>("supply-scale").value = form.supplyScale;
  els.byId<HTMLInputElement>("trader-floor").value = form.traderFloor;
  els.byId<HTMLInputElement>("clustering").checked = form.clustering;
  els.byId<HTMLSelectElement>("supply-mode").value = form.supplyMode;
  els.byId<HTMLSelectElement>("solver").value = form.solver;
  els.byId<HTMLInputElement>("seed").value = form.seed;
  els.byId<HTMLInputElement>("high-volume-threshold").value = form.highVolumeThreshold;
}

function showErrors(els: Elements, form: ScenarioFormState): void {
  const errors = fieldErrors(form);
  const box = els.byId("form-errors");
  box.innerHTML = Object.values(errors)
    .map((msg) => `<p class="field-error">${esc(msg)}</p>`)
    .join("");
  els.byId<HTMLButtonElement>("run").disabled = !canSubmit(form);
}

export function init(root: Document, client?: ServiceClient): void {
  const els = elements(root);
  const serviceUrl = () => els.byId<HTMLInputElement>("service-url").value;
  const api = () => client ?? new ServiceClient(serviceUrl());
  const pins = new PinStore();
  let sites: SitesDoc | undefined;
  let runSerial = 0;

  const renderPins = () => {
    const list = pins
      .list()
      .map(
        (pin) =>
          `<li><span>${esc(pin.label)}</span>` +
          `<button class="unpin" data-job="${esc(pin.jobId)}">unpin</button></li>`,
      )
      .join("");
    els.byId("pin-list").innerHTML = list;
  };

  const renderScreen = () => {
    const screen = els.byId("screen");
    const view = screenView(pins.list(), { sites });
    if (view.mode === "empty") {
      screen.innerHTML = `<p class="hint">Run a scenario and pin it to see results here.</p>`;
      return;
    }
    if (view.mode === "blocked") {
      screen.innerHTML = errorCardHtml("Comparison", view.reason);
      return;
    }
    if (view.mode === "single") {
      const v = view.view;
      screen.innerHTML = [
        `<h2>${esc(v.label)}</h2>`,
        v.costCard,
        v.warnings,
        `<div class="panel-row">${v.survival}${v.priorityMap ?? ""}</div>`,
        v.clusterSection ?? "",
        `<h3>Permit schedule</h3>`,
        v.permitTable,
        `<h3>Priority villages</h3>`,
        v.priorityTable,
      ].join("\n");
      return;
    }
    const v = view.view;
    const deltaLines = v.deltas
      .map((d) => {
        const reduction = d.reductionPct === null ? "" : `${d.reductionPct.toFixed(1)}% below historical`;
        const vsFirst =
          d.vsFirstPct === null || d.vsFirstPct === 0
            ? ""
            : ` (${d.vsFirstPct > 0 ? "+" : ""}${d.vsFirstPct.toFixed(1)}% vs first pin)`;
        return `<li><span>${esc(d.label)}</span> ${esc(reduction)}${esc(vsFirst)}</li>`;
      })
      .join("");
    screen.innerHTML = [
      `<h2>Comparison</h2>`,
      v.costBars,
      `<ul class="deltas">${deltaLines}</ul>`,
      v.warnings,
      `<div class="panel-row">${v.survivalOverlay}${v.priorityMap ?? ""}</div>`,
      v.clusterSection ?? "",
      `<h3>Permit schedule (${esc(v.permitLabel)})</h3>`,
      v.permitTable,
      `<h3>Priority villages (${esc(v.permitLabel)})</h3>`,
      v.priorityTable,
    ].join("\n");
  };

  // presets fill the form; runs still go through the same submit path
  const presetBox = els.byId("presets");
  presetBox.innerHTML = PRESETS.map(
    (p, i) => `<button class="preset" data-preset="${i}">${esc(p.name)}</button>`,
  ).join("");
  presetBox.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const index = target.dataset?.preset;
    if (index === undefined) return;
    writeForm(els, applyPreset(PRESETS[Number(index)]));
    showErrors(els, readForm(els));
  });

  els.byId("scenario-form").addEventListener("input", () => showErrors(els, readForm(els)));

  els.byId<HTMLButtonElement>("register").addEventListener("click", async () => {
    const status = els.byId("dataset-status");
    try {
      const res = await api().registerDataset(els.byId<HTMLInputElement>("dataset-path").value);
      els.byId<HTMLInputElement>("dataset").value = res.fingerprint;
      sites = await api().datasetSites(res.fingerprint);
      status.textContent =
        `${res.fingerprint.slice(0, 12)}… — ${res.summary.villages} villages, ` +
        `${res.summary.traders} traders`;
    } catch (err) {
      status.textContent = err instanceof Error ? err.message : String(err);
    }
  });

  els.byId<HTMLButtonElement>("run").addEventListener("click", async (ev) => {
    ev.preventDefault();
    const form = readForm(els);
    if (!canSubmit(form)) return;
    const jobBox = els.byId("job-status");
    const runId = ++runSerial;
    try {
      const run = await runScenario(api(), els.byId<HTMLInputElement>("dataset").value, formConfig(form), {
        onUpdate: (job) => {
          if (runId === runSerial) jobBox.textContent = `${job.id}: ${stageLine(job)}`;
        },
      });
      jobBox.textContent = `${run.job.id}: ${stageLine(run.job)}`;
      if (run.job.state === "failed") {
        els.byId("screen").innerHTML = errorCardHtml(run.label, run.job.error ?? "unknown error");
        return;
      }
      const outcome = pins.add(makePin(run.job.id, run.text!, run.label));
      if (!outcome.ok) {
        els.byId("screen").innerHTML = errorCardHtml(run.label, outcome.reason);
        return;
      }
      renderPins();
      renderScreen();
    } catch (err) {
      jobBox.textContent = err instanceof Error ? err.message : String(err);
    }
  });

  els.byId("pin-list").addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const jobId = target.dataset?.job;
    if (!jobId) return;
    pins.remove(jobId);
    renderPins();
    renderScreen();
  });

  writeForm(els, defaultForm());
  showErrors(els, readForm(els));
  renderScreen();
}

if (typeof document !== "undefined" && document.getElementById("scenario-form")) {
  init(document);
}
