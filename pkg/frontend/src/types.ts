// Mirrors of the service's JSON payloads (docs/api.md in the backend repo).
// The dashboard renders these verbatim; it derives nothing of its own.

export interface Observation {
  day: number
  count: number
}

export interface Priors {
  r_mean: number
  r_var: number
  k_mean: number
  k_var: number
  parameterization: string
}

export interface MhSettings {
  kept: number
  burn_in: number
  thin: number
}

export interface CriterionSettings {
  kind: string
  draws: number
  refit: string
}

export interface SessionCfg {
  budget: number
  window: number
  season: number
  n0: number
  initial_days: number[]
  criterion: CriterionSettings
  priors: Priors
  mh: MhSettings
}

export interface PosteriorSummary {
  n_kept: number
  acceptance_rate: number
  mean: { r: number; K: number }
  cov: number[][]
  ess: { r: number; K: number }
}

export interface Band {
  days: number[]
  lower: number[]
  median: number[]
  upper: number[]
  mode: string
}

export interface FrequencyRow {
  day: number
  probability: number
}

export interface Recommendation {
  step: number
  day: number
  window: number[]
  scores: number[]
  posterior_summary: PosteriorSummary
  band: Band
  terminal_draw: number[]
  // present only when the service computed selection frequencies
  frequencies?: FrequencyRow[]
}

export type SessionStatus =
  | 'awaiting-recommendation'
  | 'awaiting-observation'
  | 'budget-exhausted'
  | 'season-exhausted'

export interface SessionSnapshot {
  session_id: string
  schema_version: number
  seed: number
  status: SessionStatus
  cfg: SessionCfg
  observations: Observation[]
  recommendations: Recommendation[]
  pending: Recommendation | null
}

export interface CreateSessionRequest {
  seed: number
  initial_observations: Observation[]
  budget: number
  window: number
  season: number
  n0?: number
  criterion?: CriterionSettings
  priors?: Priors
  mh?: MhSettings
}

export interface PendingTicket {
  status: 'pending'
  poll: string
}

export interface ApiErrorBody {
  code: string
  message: string
  details?: unknown
}

export function isTerminal(status: SessionStatus): boolean {
  return status === 'budget-exhausted' || status === 'season-exhausted'
}
