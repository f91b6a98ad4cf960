/** DOM wiring: mounts the session view and forwards form submissions to the
 * controller. Rendering itself lives in render.ts as pure functions. */

import { ApiClient } from './api.js';
import {
  renderError,
  renderConstraints,
  renderPlanTable,
  renderQueryForm,
  renderTrace,
  renderVerdict,
  renderViolations,
} from './render.js';
import { buildTurnBody, SessionController } from './state.js';
import type { Query } from './types.js';

const DEFAULT_QUERY: Query = {
  origin: 'Washington',
  destination: 'Myrtle Beach',
  visiting_city_count: 1,
  dates: ['2022-03-13', '2022-03-14', '2022-03-15'],
  days: 3,
  people: 1,
  budget: 1400,
  prefs: { cuisines: [], room_rules: [], room_type: null, transport: null },
};

function readForm(form: HTMLFormElement, previous: Query): Query {
  const data = new FormData(form);
  const text = (name: string, fallback: string) =>
    String(data.get(name) ?? fallback);
  const num = (name: string, fallback: number) => {
    const parsed = Number(data.get(name));
    return Number.isFinite(parsed) && parsed > 0 ? parsed : fallback;
  };
  const days = num('days', previous.days);
  const dates = text('dates', previous.dates.join(','))
    .split(',')
    .map((d) => d.trim())
    .filter(Boolean);
  const multi = (name: string) => data.getAll(name).map(String).sort();
  const opt = (name: string) => {
    const value = text(name, '');
    return value === '' ? null : value;
  };
  return {
    origin: text('origin', previous.origin),
    destination: text('destination', previous.destination),
    visiting_city_count: { 3: 1, 5: 2, 7: 3 }[days as 3 | 5 | 7] ?? previous.visiting_city_count,
    dates,
    days,
    people: num('people', previous.people),
    budget: num('budget', previous.budget),
    prefs: {
      cuisines: multi('cuisines'),
      room_rules: multi('room_rules'),
      room_type: opt('room_type'),
      transport: opt('transport'),
    },
  };
}

export function mountApp(root: HTMLElement, baseUrl = ''): SessionController {
  const controller = new SessionController(new ApiClient(baseUrl));
  root.innerHTML = `
    <main class="session-view">
      <form id="query-form"></form>
      <div id="error-slot"></div>
      <section id="verdict-slot"></section>
      <section id="plan-slot"></section>
      <section id="violations-slot"></section>
      <details open><summary>Constraints</summary><div id="constraints-slot"></div></details>
      <details open><summary>Agent trace</summary><div id="trace-slot"></div></details>
    </main>`;

  const form = root.querySelector<HTMLFormElement>('#query-form')!;
  const slot = (id: string) => root.querySelector<HTMLElement>(`#${id}`)!;

  function sync(): void {
    const { query, lastTurn, constraints, busy, error } = controller.state;
    form.innerHTML = renderQueryForm(query ?? DEFAULT_QUERY, busy);
    slot('error-slot').innerHTML = renderError(error);
    slot('verdict-slot').innerHTML = lastTurn ? renderVerdict(lastTurn) : '';
    slot('plan-slot').innerHTML = lastTurn ? renderPlanTable(lastTurn.plan) : '';
    slot('violations-slot').innerHTML = lastTurn
      ? renderViolations(lastTurn.violations)
      : '';
    slot('constraints-slot').innerHTML = renderConstraints(constraints);
    slot('trace-slot').innerHTML = lastTurn
      ? renderTrace(lastTurn.trace, lastTurn.best_effort)
      : '';
  }

  controller.subscribe(sync);
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    void (async () => {
      const previous = controller.state.query;
      const edited = readForm(form, previous ?? DEFAULT_QUERY);
      if (!controller.state.handle) {
        await controller.createSession(edited);
        await controller.submitTurn({ query: edited });
      } else {
        await controller.submitTurn(buildTurnBody(previous ?? edited, edited));
      }
    })();
  });
  sync();
  return controller;
}
