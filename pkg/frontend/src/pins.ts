/**
 * The pinned-results store: up to four completed runs held for side-by-side
 * comparison. Pins are frozen snapshots of finished jobs; mixing datasets
 * is refused because shared axes would silently compare different
 * geographies.
 */

import { parseReport } from "./api.js";
import { describeConfig } from "./form.js";
import type { ServiceReport } from "./types.js";

export const MAX_PINS = 4;

export interface PinnedResult {
  readonly jobId: string;
  readonly label: string;
  readonly fingerprint: string;
  /** exact report bytes as served; never re-serialized */
  readonly text: string;
  readonly report: ServiceReport;
}

export function makePin(jobId: string, text: string, label?: string): PinnedResult {
  const report = parseReport(text);
  return Object.freeze({
    jobId,
    label: label ?? describeConfig(report.result.config),
    fingerprint: report.dataset_fingerprint,
    text,
    report,
  });
}

const shortFp = (fp: string) => fp.slice(0, 12);

export type PinOutcome = { ok: true } | { ok: false; reason: string };

export class PinStore {
  private pins: PinnedResult[] = [];

  list(): readonly PinnedResult[] {
    return Object.freeze(this.pins.slice());
  }

  get(jobId: string): PinnedResult | undefined {
    return this.pins.find((p) => p.jobId === jobId);
  }

  add(pin: PinnedResult): PinOutcome {
    if (this.get(pin.jobId)) {
      return { ok: false, reason: `scenario ${pin.jobId} is already pinned` };
    }
    if (this.pins.length >= MAX_PINS) {
      return {
        ok: false,
        reason: `the comparison holds at most ${MAX_PINS} results; unpin one first`,
      };
    }
    const anchor = this.pins[0];
    if (anchor && anchor.fingerprint !== pin.fingerprint) {
      return {
        ok: false,
        reason:
          `cannot compare across datasets: pinned results use ` +
          `${shortFp(anchor.fingerprint)}…, this run used ${shortFp(pin.fingerprint)}…`,
      };
    }
    this.pins.push(pin);
    return { ok: true };
  }

  remove(jobId: string): boolean {
    const before = this.pins.length;
    this.pins = this.pins.filter((p) => p.jobId !== jobId);
    return this.pins.length < before;
  }

  clear(): void {
    this.pins = [];
  }

  /** With a single result the comparison chrome stays hidden. */
  comparisonVisible(): boolean {
    return this.pins.length >= 2;
  }
}
