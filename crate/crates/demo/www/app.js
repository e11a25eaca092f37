import init, { evaluatePoint, regionMap, convergenceCurve } from "./pkg/harvestlab_demo.js";

const $ = (id) => document.getElementById(id);
const num = (form, name) => Number(form.elements[name].value);

function fail(el, e) {
  el.className = "err";
  el.textContent = String(e);
}

// runs `work` after the button state repaints; the wasm calls block the page
function busy(form, work) {
  const button = form.querySelector("button");
  button.disabled = true;
  setTimeout(() => {
    try { work(); } finally { button.disabled = false; }
  }, 20);
}

function onPoint(ev) {
  ev.preventDefault();
  const f = ev.target, out = $("point-out");
  busy(f, () => {
    try {
      const r = JSON.parse(evaluatePoint(num(f, "c1"), num(f, "c2"), num(f, "c3"), f.elements.strategy.value));
      out.className = "";
      out.textContent = [
        `E       = ${r.E.toExponential(6)}   (err ${r.err_E.toExponential(1)})`,
        `|X|     = ${r.X_abs.toExponential(6)}   (err ${r.err_X.toExponential(1)})`,
        `N       = ${r.N.toExponential(6)}   signed ${r.signed_N.toExponential(3)}`,
        `E_sp    = ${r.E_sp.toExponential(6)}`,
        `X_sp    = ${r.X_sp.toExponential(6)}   sp entangled: ${r.sp_entangled}`,
        `converged ${r.converged}, ${r.n_evals} integrand samples`,
      ].join("\n");
    } catch (e) { fail(out, e); }
  });
}

function onRegion(ev) {
  ev.preventDefault();
  const f = ev.target, stats = $("region-stats");
  busy(f, () => {
    try {
      const r = JSON.parse(regionMap(num(f, "c3"), Number(f.elements.coarse.value)));
      stats.className = "";
      stats.textContent = `${r.cells[0]} × ${r.cells[1]} cells; numeric area ${r.numeric_area.toFixed(4)}, ` +
        `stationary-phase area ${r.sp_area.toFixed(4)}, Jaccard ${r.jaccard.toFixed(4)}, unconverged ${r.unconverged}`;
      $("region-svg").innerHTML = r.svg.replace(/^<\?xml[^>]*>\s*/, "");
    } catch (e) { fail(stats, e); }
  });
}

function onCurve(ev) {
  ev.preventDefault();
  const f = ev.target, svg = $("curve");
  busy(f, () => {
    try {
      const r = JSON.parse(convergenceCurve(num(f, "c1"), num(f, "c2")));
      svg.innerHTML = curveSvg(r);
    } catch (e) { svg.innerHTML = `<text x="10" y="20" fill="#b00">${String(e)}</text>`; }
  });
}

function curveSvg(r) {
  const W = 480, H = 260, L = 44, R = 110, T = 12, B = 32;
  const x0 = r.c3[0], x1 = r.c3[r.c3.length - 1];
  const ys = [...r.E_ratio, ...r.X_ratio, r.kappa_X, 1];
  const y0 = Math.min(0, ...ys), y1 = Math.max(...ys) * 1.05;
  const px = (x) => L + (x - x0) / (x1 - x0) * (W - L - R);
  const py = (y) => H - B - (y - y0) / (y1 - y0) * (H - T - B);
  const line = (vals, color) =>
    `<polyline fill="none" stroke="${color}" stroke-width="2" points="${vals.map((v, i) => `${px(r.c3[i])},${py(v)}`).join(" ")}"/>`;
  const guide = (y, color) =>
    `<line x1="${L}" x2="${W - R}" y1="${py(y)}" y2="${py(y)}" stroke="${color}" stroke-dasharray="4 3"/>`;
  const ticks = r.c3.filter((_, i) => i % 2 === 0)
    .map((c) => `<text x="${px(c)}" y="${H - B + 14}" text-anchor="middle">${c}</text>`).join("");
  const yTicks = [0, 0.25, 0.5, 0.75, 1].filter((y) => y <= y1)
    .map((y) => `<text x="${L - 6}" y="${py(y) + 4}" text-anchor="end">${y}</text>`).join("");
  return `<rect x="${L}" y="${T}" width="${W - L - R}" height="${H - T - B}" fill="none" stroke="#999"/>` +
    guide(1, "#1f77b4") + guide(r.kappa_X, "#d62728") +
    line(r.E_ratio, "#1f77b4") + line(r.X_ratio, "#d62728") + ticks + yTicks +
    `<text x="${(L + W - R) / 2}" y="${H - 4}" text-anchor="middle">c3</text>` +
    `<text x="${W - R + 8}" y="${py(r.E_ratio.at(-1)) + 4}" fill="#1f77b4">E / E_sp</text>` +
    `<text x="${W - R + 8}" y="${py(r.X_ratio.at(-1)) + 4}" fill="#d62728">|X| / X_sp</text>`;
}

await init();
$("point-form").addEventListener("submit", onPoint);
$("region-form").addEventListener("submit", onRegion);
$("curve-form").addEventListener("submit", onCurve);
