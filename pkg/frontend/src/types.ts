/** Wire types mirroring the session service responses, field for field. */

export interface PlanDay {
  day: number;
  current_city: string;
  transportation: string;
  breakfast: string;
  attraction: string;
  lunch: string;
  dinner: string;
  accommodation: string;
}

export type PlanRecord = PlanDay[];

export const PLAN_COLUMNS: (keyof PlanDay)[] = [
  'day', 'current_city', 'transportation', 'breakfast', 'attraction',
  'lunch', 'dinner', 'accommodation',
];

export interface TurnResult {
  turn: number;
  verdict: string;
  best_effort: boolean;
  plan: PlanRecord;
  violations: string[];
  l_used: number;
  k_total: number;
  tool_calls: number;
  cities: string[];
  trace: string[];
}

export interface SessionConfig {
  k: number;
  l: number;
  tool_budget: number;
}

export interface SessionHandle {
  id: string;
  created_at: string;
  config: SessionConfig;
}

export interface QueryPrefs {
  cuisines: string[];
  room_rules: string[];
  room_type: string | null;
  transport: string | null;
}

export interface Query {
  origin: string;
  destination: string;
  visiting_city_count: number;
  dates: string[];
  days: number;
  people: number;
  budget: number;
  prefs: QueryPrefs;
}

export interface Patch {
  op: 'add' | 'remove' | 'modify';
  field: string;
  value?: unknown;
}

export type TurnBody = { query: Query } | { patches: Patch[] };

export const CUISINES = [
  'Chinese', 'American', 'Italian', 'Mexican', 'Indian', 'Mediterranean', 'French',
];
export const ROOM_RULES = [
  'parties', 'smoking', 'children-under-10', 'pets', 'visitors',
];
export const ROOM_TYPES = [
  'entire-room', 'private-room', 'shared-room', 'not-shared-room',
];
export const TRANSPORT_PREFS = ['no-flights', 'no-self-driving', 'must-self-drive'];
