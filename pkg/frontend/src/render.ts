/** Pure HTML renderers. Every displayed fact is a verbatim service value;
 * these functions only lay data out, they never derive plan semantics. */

import {
  CUISINES,
  PLAN_COLUMNS,
  ROOM_RULES,
  ROOM_TYPES,
  TRANSPORT_PREFS,
  type PlanRecord,
  type Query,
  type TurnResult,
} from './types.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderPlanTable(plan: PlanRecord): string {
  const head = PLAN_COLUMNS.map((c) => `<th>${c}</th>`).join('');
  const rows = plan
    .map((day) => {
      const cells = PLAN_COLUMNS.map(
        (c) => `<td class="plan-${c}">${escapeHtml(String(day[c]))}</td>`,
      ).join('');
      return `<tr>${cells}</tr>`;
    })
    .join('');
  return `<table class="plan-table"><thead><tr>${head}</tr></thead><tbody>${rows}</tbody></table>`;
}

export function renderViolations(lines: string[]): string {
  if (lines.length === 0) {
    return '<div class="violations empty">No violations.</div>';
  }
  const items = lines
    .map((line) => `<li class="violation">${escapeHtml(line)}</li>`)
    .join('');
  return `<ul class="violations">${items}</ul>`;
}

export interface TraceRow {
  t: number;
  l: number;
  k: number;
  agent: string;
  outcome: string;
}

const TRACE_LINE = /^t=(\d+) l=(\d+) k=(\d+) (\w+) -> (.+)$/;

export function parseTraceLine(line: string): TraceRow | null {
  const match = TRACE_LINE.exec(line);
  if (!match) return null;
  return {
    t: Number(match[1]),
    l: Number(match[2]),
    k: Number(match[3]),
    agent: match[4],
    outcome: match[5],
  };
}

export interface TraceGroup {
  t: number;
  l: number;
  rows: TraceRow[];
}

export function groupTrace(lines: string[]): TraceGroup[] {
  const groups: TraceGroup[] = [];
  for (const line of lines) {
    const row = parseTraceLine(line);
    if (!row) continue;
    const last = groups[groups.length - 1];
    if (last && last.t === row.t && last.l === row.l) {
      last.rows.push(row);
    } else {
      groups.push({ t: row.t, l: row.l, rows: [row] });
    }
  }
  return groups;
}

function badgeFor(row: TraceRow): string {
  if (row.agent === 'advise') return '<span class="badge advisor">advisor</span>';
  if (row.agent === 'search') return '<span class="badge tools">tool calls</span>';
  if (row.agent === 'check') {
    return `<span class="badge verdict verdict-${escapeHtml(row.outcome)}">${escapeHtml(row.outcome)}</span>`;
  }
  return '';
}

export function renderTrace(lines: string[], bestEffort = false): string {
  const groups = groupTrace(lines);
  const sections = groups
    .map((group) => {
      const rows = group.rows
        .map(
          (row) =>
            `<div class="trace-row agent-${row.agent}" data-k="${row.k}">` +
            `<span class="k-marker">k=${row.k}</span>` +
            `<span class="agent">${escapeHtml(row.agent)}</span>` +
            `<span class="outcome">${escapeHtml(row.outcome)}</span>` +
            badgeFor(row) +
            `</div>`,
        )
        .join('');
      return (
        `<section class="trace-group" data-t="${group.t}" data-l="${group.l}">` +
        `<header>turn ${group.t}, search step ${group.l}</header>${rows}</section>`
      );
    })
    .join('');
  const tail = bestEffort
    ? '<div class="badge best-effort terminal">best-effort</div>'
    : '';
  return `<div class="trace-timeline">${sections}${tail}</div>`;
}

export function renderConstraints(lines: string[]): string {
  const items = lines
    .map((line) => {
      const [id, kind, category] = line.split(' | ');
      return (
        `<li class="constraint kind-${escapeHtml(kind ?? '')}">` +
        `<code>${escapeHtml(id ?? '')}</code> ` +
        `<span class="category">${escapeHtml(category ?? '')}</span> ` +
        `${escapeHtml(line.split(' | ').slice(3).join(' | '))}</li>`
      );
    })
    .join('');
  return `<ul class="constraints">${items}</ul>`;
}

export function renderVerdict(turn: TurnResult): string {
  return (
    `<div class="turn-summary verdict-${escapeHtml(turn.verdict)}">` +
    `<strong>${escapeHtml(turn.verdict)}</strong>` +
    ` after ${turn.l_used} search step(s), ${turn.k_total} check(s),` +
    ` ${turn.tool_calls} tool call(s)` +
    (turn.best_effort ? ' <span class="badge best-effort">best-effort</span>' : '') +
    `</div>`
  );
}

function checkboxRow(
  name: string,
  options: string[],
  selected: string[],
): string {
  return options
    .map((option) => {
      const checked = selected.includes(option) ? ' checked' : '';
      return (
        `<label class="pill"><input type="checkbox" name="${name}" ` +
        `value="${escapeHtml(option)}"${checked}> ${escapeHtml(option)}</label>`
      );
    })
    .join('');
}

function selectRow(name: string, options: string[], selected: string | null): string {
  const opts = ['<option value="">(none)</option>']
    .concat(
      options.map((option) => {
        const sel = option === selected ? ' selected' : '';
        return `<option value="${escapeHtml(option)}"${sel}>${escapeHtml(option)}</option>`;
      }),
    )
    .join('');
  return `<select name="${name}">${opts}</select>`;
}

export function renderQueryForm(query: Query, busy: boolean): string {
  const disabled = busy ? ' disabled' : '';
  return `
<fieldset class="query-form"${busy ? ' disabled' : ''}>
  <div class="row structural">
    <label>origin <input name="origin" value="${escapeHtml(query.origin)}"${disabled}></label>
    <label>destination <input name="destination" value="${escapeHtml(query.destination)}"${disabled}></label>
    <label>days <input name="days" type="number" value="${query.days}"${disabled}></label>
    <label>dates <input name="dates" value="${escapeHtml(query.dates.join(','))}"${disabled}></label>
  </div>
  <div class="row">
    <label>people <input name="people" type="number" min="1" value="${query.people}"${disabled}></label>
    <label>budget <input name="budget" type="number" min="1" value="${query.budget}"${disabled}></label>
  </div>
  <div class="row cuisines">${checkboxRow('cuisines', CUISINES, query.prefs.cuisines)}</div>
  <div class="row room-rules">${checkboxRow('room_rules', ROOM_RULES, query.prefs.room_rules)}</div>
  <div class="row">
    <label>room type ${selectRow('room_type', ROOM_TYPES, query.prefs.room_type)}</label>
    <label>transport ${selectRow('transport', TRANSPORT_PREFS, query.prefs.transport)}</label>
  </div>
  <button type="submit" class="submit-turn"${disabled}>Replan</button>
</fieldset>`;
}

export function renderError(message: string | null): string {
  if (!message) return '<div class="inline-error hidden"></div>';
  return `<div class="inline-error" role="alert">${escapeHtml(message)}</div>`;
}
