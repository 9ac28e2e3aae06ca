import type {
  Band,
  CreateSessionRequest,
  Observation,
  PendingTicket,
  SessionSnapshot,
} from './types.js'

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details?: unknown,
  ) {
    super(message)
    this.name = 'ApiError'
  }
}

export type RecommendResult =
  | { kind: 'ready'; snapshot: SessionSnapshot }
  | { kind: 'pending'; poll: string }

async function parseError(res: Response): Promise<ApiError> {
  try {
    const body = (await res.json()) as { code?: string; message?: string; details?: unknown }
    return new ApiError(res.status, body.code ?? 'internal', body.message ?? res.statusText, body.details)
  } catch {
    return new ApiError(res.status, 'internal', res.statusText)
  }
}

export class ApiClient {
  constructor(readonly base: string = '') {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const res = await fetch(this.base + path, init)
    if (!res.ok && res.status !== 202) throw await parseError(res)
    return res
  }

  private post(path: string, body?: unknown): Promise<Response> {
    return this.request(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    })
  }

  async createSession(body: CreateSessionRequest): Promise<SessionSnapshot> {
    const res = await this.post('/sessions', body)
    return (await res.json()) as SessionSnapshot
  }

  async getSession(id: string): Promise<SessionSnapshot> {
    const res = await this.request(`/sessions/${id}`)
    return (await res.json()) as SessionSnapshot
  }

  async recommend(id: string): Promise<RecommendResult> {
    const res = await this.post(`/sessions/${id}/recommend`)
    if (res.status === 202) {
      const ticket = (await res.json()) as PendingTicket
      return { kind: 'pending', poll: ticket.poll }
    }
    return { kind: 'ready', snapshot: (await res.json()) as SessionSnapshot }
  }

  async pollRecommendation(id: string): Promise<RecommendResult> {
    const res = await this.request(`/sessions/${id}/recommendation`)
    if (res.status === 202) {
      const ticket = (await res.json()) as PendingTicket
      return { kind: 'pending', poll: ticket.poll }
    }
    return { kind: 'ready', snapshot: (await res.json()) as SessionSnapshot }
  }

  async addObservation(id: string, obs: Observation & { override?: boolean }): Promise<SessionSnapshot> {
    const res = await this.post(`/sessions/${id}/observations`, {
      day: obs.day,
      count: obs.count,
      override: obs.override ?? false,
    })
    return (await res.json()) as SessionSnapshot
  }

  async getBand(id: string): Promise<Band> {
    const res = await this.request(`/sessions/${id}/band`)
    return (await res.json()) as Band
  }
}
