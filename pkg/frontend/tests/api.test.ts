import { afterEach, describe, expect, it, vi } from 'vitest'

import { ApiClient, ApiError } from '../src/api.js'
import { pollUntilReady } from '../src/poll.js'
import { fixtureSnapshot, installFetchMock } from './helpers.js'

afterEach(() => {
  vi.unstubAllGlobals()
})

describe('ApiClient', () => {
  it('posts session creation bodies and parses the snapshot', async () => {
    const snap = fixtureSnapshot()
    const { calls } = installFetchMock([{ method: 'POST', path: '/sessions', status: 201, body: snap }])

    const client = new ApiClient()
    const created = await client.createSession({
      seed: 5,
      initial_observations: snap.observations.slice(0, 3),
      budget: 5,
      window: 5,
      season: 12,
    })

    expect(created.session_id).toBe('s0001')
    expect(calls).toHaveLength(1)
    expect(calls[0].url).toBe('/sessions')
    expect(calls[0].body).toMatchObject({ seed: 5, budget: 5, window: 5, season: 12 })
  })

  it('prefixes every request with the configured base URL', async () => {
    const { calls } = installFetchMock([
      { method: 'GET', path: '/sessions/s0001', body: fixtureSnapshot() },
    ])

    await new ApiClient('http://api.example:9').getSession('s0001')

    expect(calls[0].url).toBe('http://api.example:9/sessions/s0001')
  })

  it('surfaces the error envelope as a typed ApiError', async () => {
    installFetchMock([
      {
        method: 'POST',
        path: '/sessions',
        status: 422,
        body: { code: 'invalid-value', message: 'budget must cover the initial design' },
      },
    ])

    const client = new ApiClient()
    const attempt = client.createSession({
      seed: 0,
      initial_observations: [{ day: 1, count: 4 }],
      budget: 0,
      window: 5,
      season: 12,
    })

    await expect(attempt).rejects.toMatchObject({
      name: 'ApiError',
      status: 422,
      code: 'invalid-value',
      message: 'budget must cover the initial design',
    })
  })

  it('distinguishes ready and pending recommend responses', async () => {
    installFetchMock([
      {
        method: 'POST',
        path: '/sessions/s0001/recommend',
        status: 202,
        body: { status: 'pending', poll: '/sessions/s0001/recommendation' },
      },
      { method: 'GET', path: '/sessions/s0001/recommendation', body: fixtureSnapshot() },
    ])

    const client = new ApiClient()
    const first = await client.recommend('s0001')
    expect(first).toEqual({ kind: 'pending', poll: '/sessions/s0001/recommendation' })

    const polled = await client.pollRecommendation('s0001')
    expect(polled.kind).toBe('ready')
  })

  it('defaults the override flag to false', async () => {
    const { calls } = installFetchMock([
      { method: 'POST', path: '/sessions/s0001/observations', body: fixtureSnapshot() },
    ])

    await new ApiClient().addObservation('s0001', { day: 8, count: 17 })

    expect(calls[0].body).toEqual({ day: 8, count: 17, override: false })
  })
})

describe('pollUntilReady', () => {
  it('retries at the polling interval until the snapshot is ready', async () => {
    const snap = fixtureSnapshot()
    const results = [
      { kind: 'pending' as const, poll: '/x' },
      { kind: 'pending' as const, poll: '/x' },
      { kind: 'ready' as const, snapshot: snap },
    ]
    let i = 0
    const sleeps: number[] = []

    const got = await pollUntilReady(
      async () => results[i++],
      undefined,
      async ms => {
        sleeps.push(ms)
      },
    )

    expect(got.session_id).toBe(snap.session_id)
    expect(sleeps).toEqual([1000, 1000])
  })
})

describe('ApiError', () => {
  it('falls back to a generic error for non-JSON failures', async () => {
    vi.stubGlobal(
      'fetch',
      vi.fn(async () => new Response('<html>boom</html>', { status: 500, statusText: 'Internal Server Error' })),
    )

    await expect(new ApiClient().getSession('s0001')).rejects.toMatchObject({
      status: 500,
      code: 'internal',
    })
    expect(new ApiError(404, 'not-found', 'gone')).toBeInstanceOf(Error)
  })
})
