import init, { mqc_signal, cts_overhead_curve, damping_sample } from "./pkg/scu_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function plot(canvas, series, { logX = false, logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 36;
  ctx.clearRect(0, 0, w, h);
  const tx = logX ? Math.log10 : (v) => v;
  const ty = logY ? Math.log10 : (v) => v;
  const pts = series.flatMap((s) => s.points);
  const xs = pts.map((p) => tx(p[0]));
  const ys = pts.map((p) => ty(p[1]));
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  const sx = (v) => pad + ((tx(v) - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const sy = (v) => h - pad - ((ty(v) - y0) / (y1 - y0)) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.fillText(y1.toPrecision(3) + (logY ? " (log)" : ""), 2, pad);
  ctx.fillText(y0.toPrecision(3), 2, h - pad);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.fillStyle = s.color;
    ctx.beginPath();
    s.points.forEach(([x, y], i) => (i ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
    if (s.line) ctx.stroke();
    if (s.dots) for (const [x, y] of s.points) ctx.fillRect(sx(x) - 2, sy(y) - 2, 4, 4);
  }
}

function guard(out, f) {
  try {
    f();
  } catch (e) {
    $(out).textContent = "error: " + e;
  }
}

function runMqc() {
  guard("mqc-out", () => {
    const n = num("mqc-n"), p = num("mqc-p");
    const r = JSON.parse(mqc_signal(n, p, num("mqc-shots"), BigInt(num("mqc-seed"))));
    const measured = r.theta.map((t, i) => [t, r.mean[i]]);
    const fine = Array.from({ length: 200 }, (_, i) => {
      const t = (2 * Math.PI * i) / 199;
      return [t, 0.5 * Math.pow(1 - p, n - 1) * (1 + Math.cos(n * t))];
    });
    plot($("mqc-plot"), [
      { points: fine, color: "#bbb", line: true },
      { points: measured, color: "#c33", dots: true },
    ]);
    $("mqc-out").textContent =
      `F = ${r.fidelity.toFixed(4)} ± ${r.fidelity_stderr.toFixed(4)}   analytic ${r.analytic.toFixed(4)}   λ = ${r.lambda.toFixed(4)}`;
  });
}

function runCts() {
  guard("cts-out", () => {
    const r = JSON.parse(cts_overhead_curve(num("cts-n"), num("cts-t"), num("cts-m"), 5n, 100000n));
    const pts = r.points.map((q) => [q.r, q.lambda - 1]);
    plot($("cts-plot"), [{ points: pts, color: "#36c", line: true, dots: true }], { logX: true, logY: true });
    $("cts-out").textContent =
      `λ−1 against r (log-log); steps for λ ≤ 2: ${r.steps_for_lambda_2 ?? "none below the step cap"}`;
  });
}

function runDamping() {
  guard("ad-out", () => {
    const r = JSON.parse(damping_sample(num("ad-p"), num("ad-count"), BigInt(num("ad-seed"))));
    const total = r.counts.reduce((a, b) => a + b, 0);
    const rows = r.probs.map(
      (q, i) => `term ${i}: p = ${q.toFixed(5)}   observed ${(r.counts[i] / total).toFixed(5)}`,
    );
    $("ad-out").textContent = [`λ = ${r.lambda.toFixed(5)}`, ...rows].join("\n");
  });
}

await init();
$("mqc-run").onclick = runMqc;
$("cts-run").onclick = runCts;
$("ad-run").onclick = runDamping;
runMqc();
