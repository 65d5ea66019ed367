import init, { survival_curve, phase_mean_curve, phase_spectrum } from "./pkg/dampedwig_demo.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c"];

// series: arrays of [x, y] points; NaN points are skipped
function plot(canvas, series, { dots = false, yRange = null } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const pts = series.flat().filter(([, y]) => Number.isFinite(y));
  const xs = pts.map((p) => p[0]);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = yRange ?? [Math.min(...pts.map((p) => p[1])), Math.max(...pts.map((p) => p[1]))];
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - y0) / (y1 - y0)) * (h - 2 * pad);

  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(y1.toPrecision(3), 2, pad + 4);
  ctx.fillText(y0.toPrecision(3), 2, h - pad);
  ctx.fillText(x0.toPrecision(3), pad, h - pad + 14);
  ctx.fillText(x1.toPrecision(3), w - pad - 20, h - pad + 14);

  series.forEach((s, k) => {
    ctx.strokeStyle = ctx.fillStyle = COLORS[k % COLORS.length];
    ctx.beginPath();
    let pen = false;
    for (const [x, y] of s) {
      if (!Number.isFinite(y)) { pen = false; continue; }
      if (dots) { ctx.fillRect(sx(x) - 1.5, sy(y) - 1.5, 3, 3); continue; }
      pen ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y));
      pen = true;
    }
    ctx.stroke();
  });
}

function columns(flat, width) {
  const rows = [];
  for (let i = 0; i < flat.length; i += width) rows.push(Array.from(flat.slice(i, i + width)));
  return rows;
}

function panel(id, run) {
  const root = document.getElementById(id);
  const num = (name) => parseFloat(root.querySelector(`[name=${name}]`).value);
  const err = root.querySelector(".err");
  const go = () => {
    err.textContent = "";
    try {
      run(num, root.querySelector("canvas"));
    } catch (e) {
      err.textContent = e.message ?? String(e);
    }
  };
  root.querySelector("button").addEventListener("click", go);
  go();
}

await init();

panel("survival", (num, canvas) => {
  const rows = columns(survival_curve(num("d"), num("b"), num("n0"), num("tmax"), 400), 4);
  plot(canvas, [1, 2, 3].map((c) => rows.map((r) => [r[0], r[c]])), { yRange: [0, 1] });
});

panel("phase", (num, canvas) => {
  const rows = columns(phase_mean_curve(num("d"), num("b"), num("tmax"), 300), 2);
  plot(canvas, [rows]);
});

panel("spectrum", (num, canvas) => {
  const values = phase_spectrum(num("n"), num("bt"));
  plot(canvas, [Array.from(values, (v, i) => [i, v])], { dots: true, yRange: [-Math.PI, Math.PI] });
});
