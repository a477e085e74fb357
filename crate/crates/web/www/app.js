import init, { certify, constantsTable, betaSweep } from "./pkg/pinchcert_web.js";

const $ = (id) => document.getElementById(id);

function inputs() {
  return [Number($("n").value), $("eps").value, $("a").value, $("alpha").value, $("beta").value];
}

function clear() {
  for (const id of ["error", "verdict", "table", "out"]) $(id).textContent = "";
  $("plot").hidden = true;
}

function guarded(f) {
  return () => {
    clear();
    try {
      f();
    } catch (e) {
      $("error").textContent = String(e);
    }
  };
}

function cell(row, text, cls) {
  const td = row.insertCell();
  td.textContent = text;
  if (cls) td.className = cls;
}

function showCertificate() {
  const [n, eps, a, alpha, beta] = inputs();
  const json = certify(n, eps, a, alpha, beta, $("strict").checked, $("skip").checked, "json");
  const c = JSON.parse(json);
  const v = $("verdict");
  v.className = c.verdict;
  v.textContent = c.verdict === "pass" ? "PASS" : `FAIL (first failing condition: ${c.first_failure})`;
  const t = document.createElement("table");
  const h = t.createTHead().insertRow();
  for (const k of ["id", "condition", "status", "exact", "decimal", "printed"]) cell(h, k);
  for (const cond of c.conditions) {
    const r = t.insertRow();
    cell(r, cond.id);
    cell(r, cond.title);
    cell(r, cond.status, cond.status === "fail" ? "fail" : cond.status === "pass" ? "pass" : "");
    cell(r, typeof cond.exact === "string" ? cond.exact : cond.exact ? JSON.stringify(cond.exact) : "—");
    cell(r, cond.decimal ?? "—");
    cell(r, cond.published ? `${cond.published.printed} (${cond.published.matches ? "match" : "mismatch"})` : "—",
      cond.published && !cond.published.matches ? "mismatch" : "");
  }
  $("table").append(t);
  $("out").textContent = json;
}

function showConstants() {
  const rows = JSON.parse(constantsTable(...inputs()));
  const t = document.createElement("table");
  const h = t.createTHead().insertRow();
  for (const k of ["symbol", "exact", "decimal", "printed", "flag"]) cell(h, k);
  for (const row of rows) {
    const r = t.insertRow();
    cell(r, row.symbol);
    cell(r, typeof row.exact === "string" ? row.exact : row.exact ? JSON.stringify(row.exact) : "bracketed");
    cell(r, row.decimal);
    cell(r, row.published ? row.published.printed : "—");
    cell(r, row.published ? (row.published.matches ? "match" : "MISMATCH") : "—", row.published && !row.published.matches ? "mismatch" : "");
  }
  $("table").append(t);
}

function showSweep() {
  const [n, eps, a, alpha] = inputs();
  const pts = JSON.parse(betaSweep(n, eps, a, alpha, $("blo").value, $("bhi").value, 80));
  const cv = $("plot");
  cv.hidden = false;
  const g = cv.getContext("2d");
  g.clearRect(0, 0, cv.width, cv.height);
  const xs = pts.map((p) => p.beta_f64);
  const ys = pts.map((p) => p.det_f64);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(0, ...ys), Math.max(0, ...ys)];
  const px = (x) => 40 + ((x - x0) / (x1 - x0 || 1)) * (cv.width - 60);
  const py = (y) => cv.height - 20 - ((y - y0) / (y1 - y0 || 1)) * (cv.height - 40);
  g.strokeStyle = "#999";
  g.beginPath();
  g.moveTo(px(x0), py(0));
  g.lineTo(px(x1), py(0));
  g.stroke();
  g.strokeStyle = "#1f4e9c";
  g.beginPath();
  pts.forEach((p, i) => (i ? g.lineTo : g.moveTo).call(g, px(p.beta_f64), py(p.det_f64)));
  g.stroke();
  for (const p of pts) {
    g.fillStyle = p.classification === "PositiveDefinite" ? "#176317" : p.classification === "PositiveSemidefiniteSingular" ? "#d08b00" : "#a31515";
    g.fillRect(px(p.beta_f64) - 2, py(p.det_f64) - 2, 4, 4);
  }
  $("out").textContent = pts.map((p) => `β = ${p.beta}\tdet S = ${p.det}\t${p.classification}`).join("\n");
}

await init();
$("certify").onclick = guarded(showCertificate);
$("constants").onclick = guarded(showConstants);
$("sweep").onclick = guarded(showSweep);
