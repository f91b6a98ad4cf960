/** Session controller: holds the handle, the query the service last
 * accepted, and the latest turn result. One turn may be in flight at a
 * time (the service enforces the same with 409); service errors surface as
 * inline messages without touching the accepted state. */

import { ApiClient, ApiError } from './api.js';
import type { Patch, Query, SessionHandle, TurnBody, TurnResult } from './types.js';

export type Listener = () => void;

export interface SessionViewState {
  handle: SessionHandle | null;
  query: Query | null;
  lastTurn: TurnResult | null;
  constraints: string[];
  busy: boolean;
  error: string | null;
}

function cloneQuery(query: Query): Query {
  return JSON.parse(JSON.stringify(query)) as Query;
}

/** Structural fields cannot be patched turn-over-turn; editing one means
 * the next turn must carry a full query. */
const STRUCTURAL_FIELDS = ['origin', 'destination', 'days', 'visiting_city_count'] as const;

export function buildTurnBody(previous: Query, edited: Query): TurnBody {
  for (const field of STRUCTURAL_FIELDS) {
    if (JSON.stringify(previous[field]) !== JSON.stringify(edited[field])) {
      return { query: edited };
    }
  }
  if (JSON.stringify(previous.dates) !== JSON.stringify(edited.dates)) {
    return { query: edited };
  }
  const patches: Patch[] = [];
  if (previous.budget !== edited.budget) {
    patches.push({ op: 'modify', field: 'budget', value: edited.budget });
  }
  if (previous.people !== edited.people) {
    patches.push({ op: 'modify', field: 'people', value: edited.people });
  }
  for (const [field, before, after] of [
    ['prefs.cuisines', previous.prefs.cuisines, edited.prefs.cuisines],
    ['prefs.room_rules', previous.prefs.room_rules, edited.prefs.room_rules],
  ] as const) {
    for (const value of after) {
      if (!before.includes(value)) patches.push({ op: 'add', field, value });
    }
    for (const value of before) {
      if (!after.includes(value)) patches.push({ op: 'remove', field, value });
    }
  }
  for (const [field, before, after] of [
    ['prefs.room_type', previous.prefs.room_type, edited.prefs.room_type],
    ['prefs.transport', previous.prefs.transport, edited.prefs.transport],
  ] as const) {
    if (before !== after) {
      if (after === null) patches.push({ op: 'remove', field });
      else patches.push({ op: 'modify', field, value: after });
    }
  }
  return { patches };
}

/** Mirror of the service-side patch semantics, used only to keep the form
 * in sync with what the service accepted. */
export function applyPatchesLocal(query: Query, patches: Patch[]): Query {
  const next = cloneQuery(query);
  for (const patch of patches) {
    switch (patch.field) {
      case 'budget':
        next.budget = patch.value as number;
        break;
      case 'people':
        next.people = patch.value as number;
        break;
      case 'prefs.cuisines':
      case 'prefs.room_rules': {
        const key = patch.field.split('.')[1] as 'cuisines' | 'room_rules';
        const values = new Set(next.prefs[key]);
        if (patch.op === 'add') values.add(patch.value as string);
        else if (patch.op === 'remove') values.delete(patch.value as string);
        else next.prefs[key] = [...(patch.value as string[])];
        if (patch.op !== 'modify') next.prefs[key] = [...values].sort();
        break;
      }
      case 'prefs.room_type':
        next.prefs.room_type = patch.op === 'remove' ? null : (patch.value as string);
        break;
      case 'prefs.transport':
        next.prefs.transport = patch.op === 'remove' ? null : (patch.value as string);
        break;
      default:
        break;
    }
  }
  return next;
}

export class SessionController {
  private listeners: Listener[] = [];

  readonly state: SessionViewState = {
    handle: null,
    query: null,
    lastTurn: null,
    constraints: [],
    busy: false,
    error: null,
  };

  constructor(private readonly api: ApiClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  async createSession(query: Query): Promise<void> {
    this.state.error = null;
    this.state.handle = await this.api.createSession(query);
    this.state.query = cloneQuery(query);
    this.emit();
  }

  /** Post one turn. Returns the result, or null when the service declined
   * (the decline reason lands in state.error; accepted state is kept). */
  async submitTurn(body: TurnBody): Promise<TurnResult | null> {
    if (!this.state.handle) throw new Error('no active session');
    if (this.state.busy) {
      this.state.error = 'a turn is already in progress';
      this.emit();
      return null;
    }
    this.state.busy = true;
    this.state.error = null;
    this.emit();
    try {
      const result = await this.api.postTurn(this.state.handle.id, body);
      this.state.lastTurn = result;
      if ('query' in body) {
        this.state.query = cloneQuery(body.query);
      } else if (this.state.query) {
        this.state.query = applyPatchesLocal(this.state.query, body.patches);
      }
      this.state.constraints =
        (await this.api.getConstraints(this.state.handle.id)).lines;
      return result;
    } catch (err) {
      if (err instanceof ApiError) {
        this.state.error = `${err.status}: ${err.detail}`;
        return null;
      }
      throw err;
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }
}
