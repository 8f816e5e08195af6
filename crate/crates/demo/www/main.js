import init, { analyze_finite, analyze_omega, check_automaton, example } from "./pkg/mcuba_demo.js";

const $ = (id) => document.getElementById(id);
const BIAS_STEPS = 12;

function escape(s) {
  return String(s).replace(/[&<>"]/g, (c) => ({ "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;" })[c]);
}

function failure(f) {
  return `<p class="bad">error (exit ${f.exit_code}): ${escape(f.error)}</p>`;
}

function value(v) {
  return `<b>${escape(v.exact)}</b> ≈ ${escape(v.decimal)}`;
}

function outcome(r) {
  return "Ok" in r ? value(r.Ok) : `<span class="bad">${escape(r.Err.error)}</span>`;
}

function preset(select, area) {
  const load = () => { area.value = example(select.value); };
  select.addEventListener("change", load);
  load();
}

function gcd(a, b) {
  return b === 0 ? a : gcd(b, a % b);
}

function bias() {
  const n = Number($("omega-bias").value);
  const g = gcd(n, BIAS_STEPS) || 1;
  return [n / g, BIAS_STEPS / g];
}

function runFinite() {
  const r = JSON.parse(analyze_finite($("fin-mc").value, $("fin-aut").value));
  if ("error" in r) {
    $("fin-out").innerHTML = failure(r);
    return;
  }
  $("fin-out").innerHTML =
    `<p>linear system: ${outcome(r.linear_system)}</p>` +
    `<p>subset oracle: ${outcome(r.oracle)}` +
    (r.oracle_states === null ? "" : ` (${r.oracle_states} subset states)`) + "</p>";
}

function runOmega() {
  const [num, den] = bias();
  $("omega-p").textContent = `${num}/${den}`;
  const r = JSON.parse(analyze_omega(num, den, $("omega-aut").value));
  if ("error" in r) {
    $("omega-out").innerHTML = failure(r);
    return;
  }
  const rows = r.recurrence
    .map((x) => `<tr><td>${escape(x.s)}</td><td>${escape(x.q)}</td><td>${escape(x.prob_h)}</td>` +
      `<td class="${x.recurrent ? "good" : "bad"}">${x.recurrent}</td></tr>`)
    .join("");
  $("omega-out").innerHTML =
    `<p>procedure: ${value(r.procedure)} <small>(${escape(r.soundness_flag)})</small></p>` +
    (r.exact ? `<p>exact (deterministic automaton): ${value(r.exact)}</p>` : "") +
    `<p>sampled upper estimate (4 visits to F within 200 steps): ${r.visits_estimate.toFixed(4)} ± ${r.visits_half_width.toFixed(4)}</p>` +
    `<table><tr><th>s</th><th>q</th><th>Pr(H)</th><th>recurrent</th></tr>${rows}</table>`;
}

function property(name, p) {
  if (p === null) return "";
  const w = p.witness ? ` — ${escape(p.witness)}` : "";
  return `<tr><td>${name}</td><td class="${p.holds ? "good" : "bad"}">${p.holds}${w}</td></tr>`;
}

function runCheck() {
  const r = JSON.parse(check_automaton($("check-aut").value));
  if ("error" in r) {
    $("check-out").innerHTML = failure(r);
    return;
  }
  $("check-out").innerHTML =
    `<p>${escape(r.mode)}, ${r.states} states</p><table>` +
    property("unambiguous", r.unambiguous) +
    property("prefix-unambiguous", r.prefix_unambiguous) +
    property("separated", r.separated) +
    `<tr><td>deterministic</td><td>${r.deterministic}</td></tr></table>`;
}

await init();
preset($("fin-mc-preset"), $("fin-mc"));
preset($("fin-aut-preset"), $("fin-aut"));
preset($("omega-preset"), $("omega-aut"));
preset($("check-preset"), $("check-aut"));
$("fin-run").addEventListener("click", runFinite);
$("omega-run").addEventListener("click", runOmega);
$("omega-bias").addEventListener("input", runOmega);
$("check-run").addEventListener("click", runCheck);
runFinite();
runOmega();
runCheck();
