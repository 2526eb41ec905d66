// Expects the wasm-bindgen output in ./pkg (see the README).
import init, { gallery_space, query, build_demo } from "./pkg/steiner_web.js";

const $ = (id) => document.getElementById(id);
let space = null;
let selected = new Set();

function positions(n) {
  const r = 200, cx = 240, cy = 240;
  return Array.from({ length: n }, (_, i) => {
    const t = (2 * Math.PI * i) / n - Math.PI / 2;
    return [cx + r * Math.cos(t), cy + r * Math.sin(t)];
  });
}

function draw() {
  const ctx = $("g-canvas").getContext("2d");
  ctx.clearRect(0, 0, 480, 480);
  if (!space) return;
  const pos = positions(space.points);
  space.lines.forEach((line, i) => {
    ctx.strokeStyle = `hsl(${(i * 47) % 360} 60% 45%)`;
    ctx.beginPath();
    line.forEach((p, j) => (j ? ctx.lineTo : ctx.moveTo).call(ctx, ...pos[p]));
    ctx.closePath();
    ctx.stroke();
  });
  pos.forEach(([x, y], p) => {
    ctx.fillStyle = selected.has(p) ? "#d22" : "#222";
    ctx.beginPath();
    ctx.arc(x, y, 7, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillText(p, x + 9, y - 9);
  });
}

function refreshQuery() {
  const set = [...selected].sort((a, b) => a - b);
  $("q-set").textContent = set.length ? `X = {${set.join(", ")}}` : "X = ∅";
  try {
    const q = JSON.parse(query(space.ls, new Uint32Array(set)));
    $("q-out").textContent = `δ(X) = ${q.delta}\nd(X) = ${q.d}\nicl(X) = {${q.icl.join(", ")}}\ncl_d(X) = {${q.closure.join(", ")}}`;
  } catch (e) {
    $("q-out").textContent = String(e);
  }
}

function load() {
  try {
    space = JSON.parse(gallery_space($("g-name").value, Number($("g-k").value)));
  } catch (e) {
    $("q-out").textContent = String(e);
    return;
  }
  selected = new Set();
  draw();
  refreshQuery();
}

$("g-canvas").addEventListener("click", (ev) => {
  if (!space) return;
  const rect = ev.target.getBoundingClientRect();
  const [x, y] = [ev.clientX - rect.left, ev.clientY - rect.top];
  positions(space.points).forEach(([px, py], p) => {
    if (Math.hypot(px - x, py - y) < 10) {
      selected.has(p) ? selected.delete(p) : selected.add(p);
    }
  });
  draw();
  refreshQuery();
});

$("b-run").addEventListener("click", () => {
  $("b-summary").textContent = "building…";
  setTimeout(() => {
    try {
      const b = JSON.parse(build_demo(Number($("b-alpha").value), Number($("b-steps").value), Number($("b-seed").value)));
      const cov = b.coverage.map(([at, c]) => `${at}: ${c.toFixed(3)}`).join(", ");
      $("b-summary").textContent = `${b.points} points, ${b.lines.length} lines; pair coverage by snapshot ${cov}`;
      $("b-trace").textContent = b.trace;
    } catch (e) {
      $("b-summary").textContent = String(e);
    }
  });
});

$("g-load").addEventListener("click", load);
await init();
load();
