import { readFileSync } from 'node:fs';

import type { FetchLike } from '../src/api.js';

export function fixture<T>(name: string): T {
  const url = new URL(`../fixtures/${name}.json`, import.meta.url);
  return JSON.parse(readFileSync(url, 'utf-8')) as T;
}

export interface Exchange {
  method: string;
  path: string;
  status: number;
  body: unknown;
}

/** Scripted fetch: answers requests in order, recording what was asked. */
export class ScriptedFetch {
  readonly seen: { method: string; path: string; body: unknown }[] = [];

  constructor(private readonly script: Exchange[]) {}

  get fn(): FetchLike {
    return async (input, init) => {
      const method = init?.method ?? 'GET';
      const body = init?.body ? JSON.parse(String(init.body)) : undefined;
      this.seen.push({ method, path: input, body });
      const next = this.script.shift();
      if (!next) throw new Error(`unexpected request ${method} ${input}`);
      if (next.method !== method || next.path !== input) {
        throw new Error(
          `expected ${next.method} ${next.path}, got ${method} ${input}`,
        );
      }
      return new Response(JSON.stringify(next.body), {
        status: next.status,
        headers: { 'Content-Type': 'application/json' },
      });
    };
  }

  get exhausted(): boolean {
    return this.script.length === 0;
  }
}
