import type { RecommendResult } from './api.js'
import type { SessionSnapshot } from './types.js'

export type Sleep = (ms: number) => Promise<void>

export const realSleep: Sleep = ms => new Promise(resolve => setTimeout(resolve, ms))

// fixed 1 s cadence while a fit runs server-side
export const POLL_INTERVAL_MS = 1000

export async function pollUntilReady(
  attempt: () => Promise<RecommendResult>,
  intervalMs: number = POLL_INTERVAL_MS,
  sleep: Sleep = realSleep,
): Promise<SessionSnapshot> {
  for (;;) {
    const result = await attempt()
    if (result.kind === 'ready') return result.snapshot
    await sleep(intervalMs)
  }
}
