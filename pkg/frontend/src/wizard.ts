import { ApiError } from './api.js'
import type { CreateSessionRequest, Observation } from './types.js'

export interface WizardValues {
  seed: number
  budget: number
  window: number
  season: number
  n0: number
  criterionKind: string
  rMean: number
  rVar: number
  kMean: number
  kVar: number
  parameterization: string
  observations: Observation[]
}

// "day,count" per line
export function parseObservations(text: string): Observation[] | string {
  const rows: Observation[] = []
  const lines = text.split('\n').map(l => l.trim()).filter(l => l.length > 0)
  if (lines.length === 0) return 'enter at least one day,count line'
  for (const line of lines) {
    const parts = line.split(',').map(p => p.trim())
    if (parts.length !== 2) return `"${line}" is not day,count`
    const day = Number(parts[0])
    const count = Number(parts[1])
    if (!Number.isInteger(day) || day < 1) return `day "${parts[0]}" must be a positive integer`
    if (!Number.isInteger(count) || count < 0) return `count "${parts[1]}" must be a non-negative integer`
    rows.push({ day, count })
  }
  for (let i = 1; i < rows.length; i++) {
    if (rows[i].day <= rows[i - 1].day) return 'days must be strictly increasing'
  }
  return rows
}

// field name -> message; empty object when the form may be submitted
export function validateWizard(v: WizardValues): Record<string, string> {
  const errors: Record<string, string> = {}
  if (!Number.isInteger(v.seed) || v.seed < 0) errors.seed = 'seed must be a non-negative integer'
  if (v.window < 1) errors.window = 'window must be at least 1'
  if (v.budget < v.observations.length) {
    errors.budget = `budget must cover the ${v.observations.length} initial observations`
  }
  if (!(v.rMean > 0)) errors.rMean = 'prior mean for r must be positive'
  if (!(v.rVar > 0)) errors.rVar = 'prior variance for r must be positive'
  if (!(v.kMean > 0)) errors.kMean = 'prior mean for K must be positive'
  if (!(v.kVar > 0)) errors.kVar = 'prior variance for K must be positive'
  if (!(v.n0 > 0)) errors.n0 = 'initial population must be positive'
  const lastDay = v.observations.length > 0 ? v.observations[v.observations.length - 1].day : 0
  if (v.season < lastDay) errors.season = 'season ends before the last initial observation'
  return errors
}

export function toCreateRequest(v: WizardValues): CreateSessionRequest {
  return {
    seed: v.seed,
    initial_observations: v.observations,
    budget: v.budget,
    window: v.window,
    season: v.season,
    n0: v.n0,
    criterion: { kind: v.criterionKind, draws: 200, refit: 'importance' },
    priors: {
      r_mean: v.rMean,
      r_var: v.rVar,
      k_mean: v.kMean,
      k_var: v.kVar,
      parameterization: v.parameterization,
    },
  }
}

const KINDS = ['A', 'D', 'I', 'UA', 'UD', 'UI']
const PARAMETERIZATIONS = ['mean-var', 'mean-logvar', 'log-precision']

function numberField(name: string, label: string, value: string, step = 'any'): string {
  return `
    <label class="field">
      <span>${label}</span>
      <input name="${name}" type="number" step="${step}" value="${value}">
      <span class="field-error" data-for="${name}" hidden></span>
    </label>`
}

export function wizardTemplate(): string {
  return `
  <form id="wizard" novalidate>
    <div class="banner error" id="wizard-banner" hidden></div>
    <fieldset>
      <legend>Campaign</legend>
      ${numberField('seed', 'seed', '0', '1')}
      ${numberField('budget', 'budget (total sampling days)', '10', '1')}
      ${numberField('window', 'look-ahead window', '10', '1')}
      ${numberField('season', 'season length (days)', '100', '1')}
      ${numberField('n0', 'population at day 0', '10')}
      <label class="field">
        <span>criterion</span>
        <select name="criterionKind">
          ${KINDS.map(k => `<option value="${k}"${k === 'I' ? ' selected' : ''}>${k}</option>`).join('')}
        </select>
      </label>
    </fieldset>
    <fieldset>
      <legend>Priors on (r, K)</legend>
      ${numberField('rMean', 'r mean', '1.0')}
      ${numberField('rVar', 'r variance', '10.0')}
      ${numberField('kMean', 'K mean', '2000')}
      ${numberField('kVar', 'K variance', '0.1')}
      <label class="field">
        <span>parameterization</span>
        <select name="parameterization">
          ${PARAMETERIZATIONS.map(p => `<option value="${p}">${p}</option>`).join('')}
        </select>
      </label>
    </fieldset>
    <fieldset>
      <legend>Initial observations (day,count per line)</legend>
      <label class="field">
        <textarea name="observations" rows="4">1,11
2,12
3,10</textarea>
        <span class="field-error" data-for="observations" hidden></span>
      </label>
    </fieldset>
    <button type="submit" id="wizard-submit">Create session</button>
  </form>`
}

function readValues(form: HTMLFormElement): { values: WizardValues | null; parseError: string | null } {
  const get = (name: string) => (form.elements.namedItem(name) as HTMLInputElement).value
  const parsed = parseObservations(get('observations'))
  if (typeof parsed === 'string') return { values: null, parseError: parsed }
  return {
    values: {
      seed: Number(get('seed')),
      budget: Number(get('budget')),
      window: Number(get('window')),
      season: Number(get('season')),
      n0: Number(get('n0')),
      criterionKind: get('criterionKind'),
      rMean: Number(get('rMean')),
      rVar: Number(get('rVar')),
      kMean: Number(get('kMean')),
      kVar: Number(get('kVar')),
      parameterization: get('parameterization'),
      observations: parsed,
    },
    parseError: null,
  }
}

function showFieldErrors(form: HTMLFormElement, errors: Record<string, string>): void {
  for (const el of Array.from(form.querySelectorAll<HTMLElement>('.field-error'))) {
    const name = el.dataset.for ?? ''
    if (name in errors) {
      el.textContent = errors[name]
      el.removeAttribute('hidden')
    } else {
      el.textContent = ''
      el.setAttribute('hidden', '')
    }
  }
}

export interface WizardOptions {
  onSubmit: (req: CreateSessionRequest) => Promise<void>
}

export function renderWizard(root: HTMLElement, opts: WizardOptions): void {
  root.innerHTML = wizardTemplate()
  const form = root.querySelector<HTMLFormElement>('#wizard')!
  const banner = root.querySelector<HTMLElement>('#wizard-banner')!
  const submit = root.querySelector<HTMLButtonElement>('#wizard-submit')!

  form.addEventListener('submit', async event => {
    event.preventDefault()
    banner.setAttribute('hidden', '')

    const { values, parseError } = readValues(form)
    if (values === null) {
      showFieldErrors(form, { observations: parseError ?? 'invalid observations' })
      return
    }
    const errors = validateWizard(values)
    showFieldErrors(form, errors)
    if (Object.keys(errors).length > 0) return

    submit.disabled = true
    try {
      await opts.onSubmit(toCreateRequest(values))
    } catch (err) {
      banner.textContent = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err)
      banner.removeAttribute('hidden')
    } finally {
      submit.disabled = false
    }
  })
}
