import init, { Simulation, simplex_trajectory, cournot_equilibrium } from "./pkg/dgne_web.js";

const $ = (id) => document.getElementById(id);
let sim = null;

function clear(ctx) {
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
}

// y values mapped by `scale` into [pad, h - pad]
function plotSeries(ctx, series, { color, lo, hi, log = false }) {
  const { width: w, height: h } = ctx.canvas;
  const pad = 20;
  const f = (v) => (log ? Math.log10(Math.max(v, 1e-12)) : v);
  const a = f(lo), b = f(hi);
  ctx.strokeStyle = color;
  ctx.beginPath();
  series.forEach((v, k) => {
    const x = pad + (k / Math.max(series.length - 1, 1)) * (w - 2 * pad);
    const y = h - pad - ((f(v) - a) / (b - a || 1)) * (h - 2 * pad);
    if (k === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
}

function range(...arrays) {
  let lo = Infinity, hi = -Infinity;
  for (const arr of arrays) for (const v of arr) if (Number.isFinite(v)) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  return [lo, hi];
}

function drawAverages() {
  const ctx = $("averages").getContext("2d");
  clear(ctx);
  const regret = Array.from(sim.average_regret()).map((v) => Math.max(v, 1e-12));
  const viol = Array.from(sim.average_violation()).map((v) => Math.max(v, 1e-12));
  const [lo, hi] = range(regret, viol);
  plotSeries(ctx, regret, { color: "#1f6fb4", lo, hi, log: true });
  plotSeries(ctx, viol, { color: "#e8871e", lo, hi, log: true });
  ctx.fillStyle = "#444";
  ctx.fillText(`${hi.toExponential(2)}`, 2, 12);
  ctx.fillText(`${lo.toExponential(2)}`, 2, ctx.canvas.height - 4);
}

function drawTracking() {
  if (!sim) return;
  const ctx = $("tracking").getContext("2d");
  clear(ctx);
  const i = Math.min(Math.max(+$("player").value, 1), sim.n_players()) - 1;
  const played = Array.from(sim.action(i));
  const target = Array.from(sim.equilibrium(i));
  const [lo, hi] = range(played, target);
  plotSeries(ctx, target, { color: "#999", lo, hi });
  plotSeries(ctx, played, { color: "#1f6fb4", lo, hi });
}

function runSimulation() {
  const n = +$("players").value;
  const horizon = +$("horizon").value;
  const started = performance.now();
  try {
    sim?.free();
    sim = new Simulation($("game").value, $("graph").value, n, horizon, 0.2, 0.8, BigInt($("seed").value));
  } catch (e) {
    $("run-info").textContent = `error: ${e.message ?? e}`;
    return;
  }
  const ms = (performance.now() - started).toFixed(0);
  const regret = sim.average_regret();
  $("run-info").textContent =
    `sigma = ${sim.sigma().toFixed(4)}, final Reg/T = ${regret[regret.length - 1].toFixed(4)}, ${ms} ms`;
  $("player").max = n;
  drawAverages();
  drawTracking();
}

// equilateral triangle with vertices e1 (top), e2 (bottom left), e3 (bottom right)
const corners = [[210, 20], [20, 350], [400, 350]];

function toCanvas(p) {
  return [0, 1].map((k) => p[0] * corners[0][k] + p[1] * corners[1][k] + p[2] * corners[2][k]);
}

function toBarycentric(x, y) {
  const [[x1, y1], [x2, y2], [x3, y3]] = corners;
  const det = (y2 - y3) * (x1 - x3) + (x3 - x2) * (y1 - y3);
  const a = ((y2 - y3) * (x - x3) + (x3 - x2) * (y - y3)) / det;
  const b = ((y3 - y1) * (x - x3) + (x1 - x3) * (y - y3)) / det;
  return [a, b, 1 - a - b];
}

function drawTriangle(ctx) {
  clear(ctx);
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  corners.forEach(([x, y], k) => (k ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
  ctx.closePath();
  ctx.stroke();
}

function drawTrajectory(start) {
  const ctx = $("simplex").getContext("2d");
  drawTriangle(ctx);
  const flat = simplex_trajectory(new Float64Array(start), new Float64Array([1, 0.2, -0.5]), +$("alpha").value, +$("steps").value);
  ctx.fillStyle = "#1f6fb4";
  ctx.strokeStyle = "#1f6fb4";
  ctx.beginPath();
  for (let k = 0; k < flat.length; k += 3) {
    const [x, y] = toCanvas([flat[k], flat[k + 1], flat[k + 2]]);
    if (k === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
    ctx.fillRect(x - 2, y - 2, 4, 4);
  }
  ctx.stroke();
}

function drawEquilibrium() {
  const t = +$("round").value;
  $("round-value").textContent = t;
  const n = 20;
  const both = cournot_equilibrium(n, t);
  const ctx = $("equilibrium").getContext("2d");
  clear(ctx);
  const { width: w, height: h } = ctx.canvas;
  const top = Math.max(...both, 1);
  const slot = (w - 40) / n;
  for (let i = 0; i < n; i++) {
    const x = 20 + i * slot;
    const solver = ((both[i] / top) * (h - 40));
    ctx.fillStyle = "#9cc3e6";
    ctx.fillRect(x + 3, h - 20 - solver, slot - 6, solver);
    const closed = ((both[n + i] / top) * (h - 40));
    ctx.fillStyle = "#c0392b";
    ctx.beginPath();
    ctx.arc(x + slot / 2, h - 20 - closed, 3, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#444";
    ctx.fillText(String(i + 1), x + slot / 2 - 5, h - 6);
  }
}

await init();
$("status").textContent = "";
$("run").addEventListener("click", runSimulation);
$("player").addEventListener("input", drawTracking);
$("simplex").addEventListener("click", (ev) => {
  const rect = ev.target.getBoundingClientRect();
  const p = toBarycentric(ev.clientX - rect.left, ev.clientY - rect.top);
  if (p.every((v) => v > 0)) drawTrajectory(p);
});
$("round").addEventListener("input", drawEquilibrium);
drawTrajectory([0.2, 0.3, 0.5]);
drawEquilibrium();
runSimulation();
