import { RunnerSession } from "./engine.js";
import { DEFAULT_PARADIGM, ParadigmSpec } from "./paradigm.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function numValue(id: string): number {
  return Number(el<HTMLInputElement>(id).value);
}

function readParadigm(): ParadigmSpec {
  return {
    ...DEFAULT_PARADIGM,
    digitDisplayMs: numValue("cfg-display"),
    responseIntervalMs: numValue("cfg-response"),
    isiRangeMs: [numValue("cfg-isi-lo"), numValue("cfg-isi-hi")],
    sequencesPerBlock: numValue("cfg-sequences"),
    blocks: numValue("cfg-blocks"),
    targetDigit: numValue("cfg-target"),
  };
}

let session: RunnerSession | null = null;
let rafId = 0;

function setRunningUi(running: boolean): void {
  el<HTMLButtonElement>("btn-start").disabled = running;
  el<HTMLButtonElement>("btn-abort").disabled = !running;
  el<HTMLFieldSetElement>("config-fields").disabled = running;
}

function render(): void {
  if (!session) return;
  const now = performance.now();
  session.tick(now);
  const digit = session.currentDigit(now);
  el("digit").textContent = digit === null ? "" : String(digit);
  el("state").textContent = session.state;
  el("progress").textContent =
    `trial ${session.trials.length} / ${session.totalTrials}`;
  const cvs = session.liveCvs;
  el("cvs").textContent = cvs === null ? "calibrating" : cvs.toFixed(3);
  el("discarded").textContent = String(session.discardedClicks);
  el("jitter").textContent = String(session.annotations.length);
  if (session.state === "done") {
    setRunningUi(false);
    el<HTMLButtonElement>("btn-export").disabled = false;
    el("state").textContent = session.aborted ? "done (aborted)" : "done";
    return;
  }
  rafId = requestAnimationFrame(render);
}

function startSession(): void {
  session = new RunnerSession({
    participant: el<HTMLInputElement>("cfg-participant").value || "anonymous",
    seed: numValue("cfg-seed"),
    paradigm: readParadigm(),
    practice: el<HTMLInputElement>("cfg-practice").checked,
  });
  setRunningUi(true);
  el<HTMLButtonElement>("btn-export").disabled = true;
  session.start(performance.now());
  rafId = requestAnimationFrame(render);
}

function abortSession(): void {
  if (!session) return;
  cancelAnimationFrame(rafId);
  session.abort(performance.now());
  render();
}

function exportSession(): void {
  if (!session) return;
  const blob = new Blob([session.exportLog()], { type: "application/jsonl" });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = `${session.participant}.jsonl`;
  a.click();
  URL.revokeObjectURL(url);
}

function onPress(ev: Event): void {
  if (!session || session.state === "idle" || session.state === "done") return;
  // event timestamps share the origin of performance.now()
  const t = ev.timeStamp > 0 ? ev.timeStamp : performance.now();
  session.click(t);
  ev.preventDefault();
}

export function main(): void {
  el("btn-start").addEventListener("click", startSession);
  el("btn-abort").addEventListener("click", abortSession);
  el("btn-export").addEventListener("click", exportSession);
  el("stage").addEventListener("mousedown", onPress);
}

main();
