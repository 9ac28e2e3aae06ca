import { vi } from 'vitest'

import type { Band, Recommendation, SessionSnapshot } from '../src/types.js'

export function fixtureBand(): Band {
  const days = Array.from({ length: 12 }, (_, i) => i + 1)
  return {
    days,
    lower: days.map(d => 9.5 + d * 1.25),
    median: days.map(d => 11.5 + d * 1.5),
    upper: days.map(d => 14.5 + d * 1.75),
    mode: 'mean-curve',
  }
}

export function fixtureRecommendation(): Recommendation {
  return {
    step: 3,
    day: 8,
    window: [4, 5, 6, 7, 8],
    scores: [24918.099606293123, 18395.101446558932, 14217.361181034875, 11504.2280826428, 9744.39340552432],
    posterior_summary: {
      n_kept: 800,
      acceptance_rate: 0.295,
      mean: { r: 0.07380100412760758, K: 1999.9471936481434 },
      cov: [
        [0.0023721336273640698, -0.0010618116465901646],
        [-0.0010618116465901646, 0.09251163839634552],
      ],
      ess: { r: 99.01244427173138, K: 131.3485273248656 },
    },
    band: fixtureBand(),
    terminal_draw: [0.10342698233305253, 2000.0824606102558],
  }
}

export function fixtureSnapshot(): SessionSnapshot {
  return {
    session_id: 's0001',
    schema_version: 1,
    seed: 5,
    status: 'awaiting-observation',
    cfg: {
      budget: 5,
      window: 5,
      season: 12,
      n0: 10.0,
      initial_days: [1, 2, 3],
      criterion: { kind: 'I', draws: 200, refit: 'importance' },
      priors: { r_mean: 1.0, r_var: 10.0, k_mean: 2000.0, k_var: 0.1, parameterization: 'mean-var' },
      mh: { kept: 800, burn_in: 200, thin: 1 },
    },
    observations: [
      { day: 1, count: 11 },
      { day: 2, count: 12 },
      { day: 3, count: 10 },
    ],
    recommendations: [fixtureRecommendation()],
    pending: fixtureRecommendation(),
  }
}

export function terminalSnapshot(): SessionSnapshot {
  const snap = fixtureSnapshot()
  return {
    ...snap,
    status: 'budget-exhausted',
    observations: [...snap.observations, { day: 8, count: 17 }, { day: 11, count: 21 }],
    pending: null,
  }
}

export interface RecordedCall {
  method: string
  url: string
  body: unknown
}

export interface Route {
  method: string
  path: string
  status?: number
  body: unknown
}

// Queue-per-endpoint fetch mock: repeated requests pop routes in order and
// the last route for an endpoint sticks, so 202, 202, 200 sequences work.
export function installFetchMock(routes: Route[]): { calls: RecordedCall[] } {
  const queues = new Map<string, Route[]>()
  for (const route of routes) {
    const key = `${route.method} ${route.path}`
    const queue = queues.get(key) ?? []
    queue.push(route)
    queues.set(key, queue)
  }
  const calls: RecordedCall[] = []

  const mock = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input)
    const method = init?.method ?? 'GET'
    const key = [...queues.keys()].find(k => {
      const [m, path] = [k.slice(0, k.indexOf(' ')), k.slice(k.indexOf(' ') + 1)]
      return m === method && url.endsWith(path)
    })
    calls.push({
      method,
      url,
      body: typeof init?.body === 'string' ? JSON.parse(init.body) : undefined,
    })
    if (key === undefined) {
      return new Response(JSON.stringify({ code: 'not-found', message: `no mock for ${method} ${url}` }), {
        status: 404,
        headers: { 'Content-Type': 'application/json' },
      })
    }
    const queue = queues.get(key)!
    const route = queue.length > 1 ? queue.shift()! : queue[0]
    return new Response(JSON.stringify(route.body), {
      status: route.status ?? 200,
      headers: { 'Content-Type': 'application/json' },
    })
  })
  vi.stubGlobal('fetch', mock)
  return { calls }
}

export function tick(): Promise<void> {
  return new Promise(resolve => setTimeout(resolve, 0))
}

export async function flush(times = 4): Promise<void> {
  for (let i = 0; i < times; i++) await tick()
}
