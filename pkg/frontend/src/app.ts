import { ApiClient, ApiError } from './api.js'
import { bandChartSvg } from './band.js'
import { renderDiagnostics } from './diagnostics.js'
import { renderObservePanel } from './observe.js'
import { pollUntilReady, realSleep } from './poll.js'
import type { Sleep } from './poll.js'
import { isTerminal } from './types.js'
import type { Recommendation, SessionSnapshot } from './types.js'
import { renderWizard } from './wizard.js'

function layoutTemplate(): string {
  return `
    <div class="banner error" id="app-banner" hidden></div>
    <header id="session-meta"></header>
    <div id="wizard-slot"></div>
    <main id="session-page" hidden>
      <section id="chart-slot"></section>
      <section id="observe-slot"></section>
      <section id="diagnostics-slot"></section>
    </main>`
}

export function sessionIdFromLocation(): string | null {
  const match = window.location.hash.match(/^#\/sessions\/(.+)$/)
  return match === null ? null : match[1]
}

// latest fitted state: the pending recommendation, or the last completed one
function currentRecommendation(snapshot: SessionSnapshot): Recommendation | null {
  if (snapshot.pending !== null) return snapshot.pending
  const recs = snapshot.recommendations
  return recs.length > 0 ? recs[recs.length - 1] : null
}

export class Dashboard {
  private snapshot: SessionSnapshot | null = null
  private busy = false

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
    private readonly sleep: Sleep = realSleep,
  ) {}

  async boot(): Promise<void> {
    this.root.innerHTML = layoutTemplate()
    const id = sessionIdFromLocation()
    if (id === null) {
      this.showWizard()
      return
    }
    try {
      this.snapshot = await this.client.getSession(id)
      this.render()
      if (this.snapshot.status === 'awaiting-recommendation') await this.advance()
    } catch (err) {
      this.showError(err)
      this.showWizard()
    }
  }

  private slot(id: string): HTMLElement {
    return this.root.querySelector<HTMLElement>(`#${id}`)!
  }

  private showWizard(): void {
    this.slot('session-page').setAttribute('hidden', '')
    renderWizard(this.slot('wizard-slot'), {
      onSubmit: async req => {
        await this.createFlow(req)
      },
    })
  }

  private async createFlow(req: Parameters<ApiClient['createSession']>[0]): Promise<void> {
    if (this.busy) return
    this.busy = true
    try {
      const created = await this.client.createSession(req)
      window.location.hash = `#/sessions/${created.session_id}`
      this.snapshot = created
      this.slot('wizard-slot').innerHTML = ''
      this.render()
    } finally {
      this.busy = false
    }
    await this.advance()
  }

  // run one recommend step, polling at 1 s while the fit is slow
  private async advance(): Promise<void> {
    if (this.busy || this.snapshot === null) return
    const id = this.snapshot.session_id
    this.busy = true
    this.render()
    try {
      const first = await this.client.recommend(id)
      this.snapshot =
        first.kind === 'ready'
          ? first.snapshot
          : await pollUntilReady(() => this.client.pollRecommendation(id), undefined, this.sleep)
    } catch (err) {
      this.showError(err)
    } finally {
      this.busy = false
    }
    this.render()
  }

  private async observeFlow(day: number, count: number, override: boolean): Promise<void> {
    if (this.busy || this.snapshot === null) return
    this.busy = true
    this.render()
    try {
      this.snapshot = await this.client.addObservation(this.snapshot.session_id, { day, count, override })
      this.clearError()
    } catch (err) {
      this.showError(err)
    } finally {
      this.busy = false
    }
    this.render()
    if (this.snapshot !== null && this.snapshot.status === 'awaiting-recommendation') {
      await this.advance()
    }
  }

  private showError(err: unknown): void {
    const banner = this.slot('app-banner')
    banner.textContent = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err)
    banner.removeAttribute('hidden')
  }

  private clearError(): void {
    const banner = this.slot('app-banner')
    banner.textContent = ''
    banner.setAttribute('hidden', '')
  }

  render(): void {
    const snapshot = this.snapshot
    if (snapshot === null) return
    this.slot('session-page').removeAttribute('hidden')

    const cfg = snapshot.cfg
    this.slot('session-meta').innerHTML = `
      <h2>Session ${snapshot.session_id}</h2>
      <p class="meta">
        status <strong id="session-status">${snapshot.status}</strong>
        &middot; criterion ${cfg.criterion.kind}
        &middot; budget ${cfg.budget}
        &middot; window ${cfg.window}
        &middot; season ${cfg.season}
        &middot; seed ${snapshot.seed}
      </p>
      <p class="meta">sampled days: <span id="sampled-days">${snapshot.observations.map(o => o.day).join(', ')}</span></p>`

    const rec = currentRecommendation(snapshot)
    const chart = this.slot('chart-slot')
    if (rec !== null) {
      chart.innerHTML = bandChartSvg({
        band: rec.band,
        observations: snapshot.observations,
        recommendedDay: snapshot.pending !== null && !isTerminal(snapshot.status) ? snapshot.pending.day : null,
      })
    } else {
      chart.innerHTML = '<p class="waiting">No fit yet.</p>'
    }

    renderObservePanel(this.slot('observe-slot'), snapshot, {
      busy: this.busy,
      onSubmit: (day, count, override) => {
        void this.observeFlow(day, count, override)
      },
    })
    renderDiagnostics(this.slot('diagnostics-slot'), rec)
  }
}
