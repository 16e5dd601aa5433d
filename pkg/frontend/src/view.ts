import { barWidth, escapeHtml, fmt3 } from "./format.js";
import type {
  FixtureInfo,
  GoalGauge,
  SessionJson,
  SessionView,
  TimelineEntry,
} from "./types.js";

/** Project the service payload onto the view model. Numbers are copied
 * verbatim; the current tolerance limits come from the latest
 * iteration's goal records, the aspiration/membership scale from the
 * session's original goals. */
export function buildSessionView(s: SessionJson): SessionView {
  const last = s.iterations[s.iterations.length - 1];
  const originals = s.original_goals ?? last?.goals ?? [];
  const gauges: GoalGauge[] = originals.map((goal, k) => {
    const current = last?.goals[k] ?? goal;
    const info = s.objectives[goal.objective];
    return {
      objective: goal.objective,
      name: info?.name ?? `objective ${goal.objective}`,
      sense: info?.sense ?? (goal.kind === "max-goal" ? "maximize" : "minimize"),
      aspiration: goal.aspiration,
      limit: current.limit,
      achieved: last?.proposal.objectives[goal.objective] ?? NaN,
      membership: last?.proposal.memberships[goal.objective] ?? NaN,
    };
  });
  const timeline: TimelineEntry[] = s.iterations.map((it) => ({
    iteration: it.proposal.iteration,
    memberships: it.proposal.memberships,
    objectives: it.proposal.objectives,
    beta: it.proposal.beta,
    decision: it.decision,
  }));
  return {
    id: s.id,
    status: s.status,
    awaiting: s.status === "awaiting-decision",
    variables: s.variables,
    objectives: s.objectives,
    x: last?.proposal.x ?? [],
    beta: last?.proposal.beta ?? NaN,
    gauges,
    timeline,
    failure: s.failure,
  };
}

function gaugeHtml(g: GoalGauge): string {
  const dir = g.sense === "maximize" ? "&ge;" : "&le;";
  return `
  <div class="gauge" data-objective="${g.objective}">
    <div class="gauge-head">
      <span class="gauge-name">${escapeHtml(g.name)} (${g.sense})</span>
      <span class="gauge-mu" data-role="mu">&mu; = ${fmt3(g.membership)}</span>
    </div>
    <div class="bar"><div class="bar-fill" style="width:${barWidth(g.membership)}"></div></div>
    <div class="gauge-detail">
      achieved <b data-role="achieved">${fmt3(g.achieved)}</b>,
      target ${dir} <b data-role="aspiration">${fmt3(g.aspiration)}</b>,
      tolerance limit <b data-role="limit">${fmt3(g.limit)}</b>
    </div>
  </div>`;
}

function timelineHtml(view: SessionView): string {
  const rows = view.timeline
    .map((entry) => {
      const bars = entry.memberships
        .map(
          (mu, k) => `
        <div class="mini-bar" title="objective ${k}">
          <div class="mini-fill" style="width:${barWidth(mu)}"></div>
          <span class="mini-label">${fmt3(mu)}</span>
        </div>`,
        )
        .join("");
      const decision = entry.decision
        ? entry.decision.verdict === "revise"
          ? `revise [${(entry.decision.targets ?? []).join(", ")}]`
          : "satisfied"
        : "&mdash;";
      const fs = entry.objectives.map((v) => fmt3(v)).join(", ");
      return `
      <tr class="timeline-row" data-iteration="${entry.iteration}">
        <td>${entry.iteration}</td>
        <td>${fs}</td>
        <td class="timeline-mu">${bars}</td>
        <td>${fmt3(entry.beta)}</td>
        <td>${decision}</td>
      </tr>`;
    })
    .join("");
  return `
  <table class="timeline">
    <thead><tr><th>iter</th><th>objectives</th><th>memberships</th>
      <th>&beta;</th><th>decision</th></tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

function controlsHtml(view: SessionView): string {
  const disabled = view.awaiting ? "" : "disabled";
  const boxes = view.objectives
    .map(
      (o) => `
    <label class="target-pick">
      <input type="checkbox" data-role="target" value="${o.index}" ${disabled}>
      improve ${escapeHtml(o.name)}
    </label>`,
    )
    .join("");
  const badge =
    view.status === "finished"
      ? '<span class="badge badge-final" data-role="final-badge">final</span>'
      : view.status === "failed"
        ? '<span class="badge badge-failed">failed</span>'
        : '<span class="badge badge-open">awaiting decision</span>';
  return `
  <div class="controls" data-status="${view.status}">
    ${badge}
    <button data-action="satisfied" ${disabled}>satisfied</button>
    <span class="revise-group">${boxes}
      <button data-action="revise" ${disabled}>revise</button></span>
    <span class="inline-error" data-role="inline-error"></span>
  </div>`;
}

export function renderSession(view: SessionView): string {
  const xs = view.variables
    .map((name, i) => `${escapeHtml(name)} = <b>${fmt3(view.x[i])}</b>`)
    .join(", ");
  const failure = view.failure
    ? `<div class="banner banner-error">pipeline failed at
       ${escapeHtml(view.failure.stage)}: ${escapeHtml(view.failure.message)}</div>`
    : "";
  return `
  <section class="session" data-session="${escapeHtml(view.id)}">
    <h2>session ${escapeHtml(view.id.slice(0, 8))}</h2>
    ${failure}
    <div class="proposal">
      <div class="solution">${xs} &nbsp; &beta; = <b>${fmt3(view.beta)}</b></div>
      <div class="gauges">${view.gauges.map(gaugeHtml).join("")}</div>
    </div>
    <h3>iteration history</h3>
    ${timelineHtml(view)}
    ${controlsHtml(view)}
  </section>`;
}

export function renderFixturePicker(fixtures: FixtureInfo[]): string {
  const rows = fixtures
    .map(
      (f) => `
    <li>
      <button data-action="open-fixture" data-fixture="${escapeHtml(f.name)}">
        ${escapeHtml(f.name)}
      </button>
      <span class="fixture-info">${f.kind}, ${f.variables.length} variables,
        ${f.objectives.length} objectives</span>
    </li>`,
    )
    .join("");
  return `
  <section class="picker">
    <h2>start a session</h2>
    <ul class="fixture-list">${rows}</ul>
  </section>`;
}

export function renderNotFound(id: string): string {
  return `
  <div class="banner banner-error" data-role="not-found">
    session not found: ${escapeHtml(id)}
    <button data-action="back-to-picker">pick a problem</button>
  </div>`;
}

export function renderNetworkError(message: string): string {
  return `
  <div class="banner banner-error" data-role="network-error">
    service unreachable: ${escapeHtml(message)}
    <button data-action="retry">retry</button>
  </div>`;
}

/** Client-side guard: a revise decision needs at least one target. */
export function reviseBlocked(targets: number[]): string | null {
  return targets.length === 0
    ? "pick at least one objective to improve"
    : null;
}
