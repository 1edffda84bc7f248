import init, { tauCurve, ghzWState, analyze, trajectory } from "./pkg/qsle_wasm.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
const $ = (id) => document.getElementById(id);

function axes(ctx, w, h, xmax, ymax, xlabel, ylabel) {
  const pad = { l: 50, r: 12, t: 10, b: 34 };
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.font = "12px system-ui";
  ctx.beginPath();
  ctx.moveTo(pad.l, pad.t);
  ctx.lineTo(pad.l, h - pad.b);
  ctx.lineTo(w - pad.r, h - pad.b);
  ctx.stroke();
  const sx = (x) => pad.l + (x / xmax) * (w - pad.l - pad.r);
  const sy = (y) => h - pad.b - (y / ymax) * (h - pad.t - pad.b);
  for (let i = 0; i <= 4; i++) {
    ctx.fillText((xmax * i / 4).toPrecision(3), sx(xmax * i / 4) - 10, h - pad.b + 15);
    ctx.fillText((ymax * i / 4).toPrecision(3), 4, sy(ymax * i / 4) + 4);
  }
  ctx.fillText(xlabel, w / 2, h - 4);
  ctx.fillText(ylabel, pad.l + 6, pad.t + 12);
  return { sx, sy };
}

function line(ctx, xs, ys, sx, sy, color) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(ys[i])) : ctx.moveTo(sx(x), sy(ys[i]))));
  ctx.stroke();
  ctx.lineWidth = 1;
}

function drawCurves() {
  const canvas = $("curve");
  const ctx = canvas.getContext("2d");
  const omegas = $("omegas").value.split(",").map(Number).filter((w) => w > 0);
  if (!omegas.length) return;
  const n = 200;
  const es = Array.from({ length: n + 1 }, (_, i) => i / n);
  const curves = omegas.map((w) => Array.from(tauCurve(w, n)));
  const ymax = Math.max(...curves.map((c) => c[n]));
  const { sx, sy } = axes(ctx, canvas.width, canvas.height, 1, ymax, "E", "tau");
  curves.forEach((c, i) => line(ctx, es, c, sx, sy, COLORS[i % COLORS.length]));
  $("curve-key").innerHTML = omegas
    .map((w, i) => `<span style="color:${COLORS[i % COLORS.length]}">&#9632; &omega; = ${w}</span>`)
    .join("");
}

let current = null;

function runAnalysis() {
  const omega = Number($("omega").value);
  const body = $("levels").querySelector("tbody");
  $("state-err").textContent = "";
  try {
    const rows = JSON.parse(analyze($("state").value, omega));
    body.innerHTML = rows
      .map((r) => `<tr><td>${r.m}</td><td>${r.e.toFixed(6)}</td><td>${r.omega_tau.toFixed(6)}</td>` +
        `<td>${r.tau.toPrecision(4)}</td><td>${r.partition}${r.converged ? "" : " (not converged)"}</td></tr>`)
      .join("");
    const level = $("level");
    const keep = level.value;
    level.innerHTML = rows.map((r) => `<option>${r.m}</option>`).join("");
    if (rows.some((r) => String(r.m) === keep)) level.value = keep;
    current = { state: $("state").value, omega };
    drawPath();
  } catch (e) {
    body.innerHTML = "";
    $("state-err").textContent = String(e);
  }
}

function drawPath() {
  if (!current) return;
  const canvas = $("path");
  const ctx = canvas.getContext("2d");
  const tr = JSON.parse(trajectory(current.state, Number($("level").value), current.omega, 200));
  const { sx, sy } = axes(ctx, canvas.width, canvas.height, tr.tau || 1, 1, "t", "fidelity");
  line(ctx, tr.t, tr.start, sx, sy, COLORS[0]);
  line(ctx, tr.t, tr.target, sx, sy, COLORS[1]);
}

function loadFamily() {
  const p = Number($("mix").value);
  $("mix-val").textContent = p.toFixed(2);
  $("state").value = ghzWState(p);
  runAnalysis();
}

await init();
$("omegas").addEventListener("input", drawCurves);
$("mix").addEventListener("input", loadFamily);
$("omega").addEventListener("change", runAnalysis);
$("run").addEventListener("click", runAnalysis);
$("level").addEventListener("change", drawPath);
drawCurves();
loadFamily();
