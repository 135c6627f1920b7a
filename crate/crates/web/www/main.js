import init, { round_stream, estimate_bins, tight_vsched, generate_uniform } from "./pkg/streampack_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function show(out, fn) {
  out.classList.remove("error");
  try {
    return fn();
  } catch (e) {
    out.classList.add("error");
    out.textContent = String(e.message ?? e);
    return null;
  }
}

function drawStaircase(canvas, big, rounded) {
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  if (big.length === 0) return;
  const x = (i) => (i / big.length) * width;
  const y = (s) => height - s * (height - 10);
  const line = (values, color) => {
    ctx.strokeStyle = color;
    ctx.beginPath();
    values.forEach((s, i) => {
      if (i === 0) ctx.moveTo(x(i), y(s));
      else ctx.lineTo(x(i), y(s));
    });
    ctx.stroke();
  };
  line(big, "#888");
  line(rounded, "#c33");
}

await init();

$("gen").onclick = () => {
  const out = $("round-out");
  show(out, () => {
    $("stream").value = generate_uniform(num("gen-n"), num("gen-lo"), num("gen-hi"), BigInt(num("gen-seed")));
    out.textContent = "";
  });
};

$("round").onclick = () => {
  const out = $("round-out");
  show(out, () => {
    const r = JSON.parse(round_stream($("stream").value, num("round-eps"), $("round-mode").value));
    drawStaircase($("staircase"), r.big, r.rounded);
    out.textContent =
      `big items ${r.big.length}, distinct rounded sizes σ = ${r.sigma}, ` +
      `groups k = ${r.k}, stored tuples ${r.stored_tuples}\n(grey: sorted sizes, red: rounded sizes)`;
  });
};

$("estimate").onclick = () => {
  const out = $("est-out");
  show(out, () => {
    const r = JSON.parse(
      estimate_bins($("stream").value, num("est-eps"), $("est-mode").value, $("est-solver").value),
    );
    const e = r.estimate;
    out.textContent =
      `estimate ${e.bins} bins (${e.case}), total size bound ${r.size_lower_bound}\n` +
      `rounded instance: σ = ${e.sigma}, packed into ${e.solution_bins} bins, free space W = ${e.free_space.toFixed(4)}\n` +
      `small volume s = ${e.small_total.toFixed(4)}, stored entries ${r.memory.stored_entries} for ${r.memory.stream_length} items`;
  });
};

$("tight").onclick = () => {
  const out = $("tight-out");
  show(out, () => {
    const r = JSON.parse(tight_vsched(num("tight-m"), num("tight-gamma")));
    const rows = r.summary.map(
      (v, i) => `  ${i < r.big_count ? "big      " : "container"} (${v.map((c) => c.toFixed(2)).join(", ")}) -> machine ${r.summary_assignment[i]}`,
    );
    out.textContent =
      `${r.jobs.length} jobs summarized into ${r.summary.length}:\n${rows.join("\n")}\n` +
      `OPT(stream) = ${r.opt_stream}, OPT(summary) = ${r.opt_summary.toFixed(4)}, 2 - 1/m = ${r.target.toFixed(4)}`;
  });
};
