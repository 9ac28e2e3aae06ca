import { isTerminal } from './types.js'
import type { SessionSnapshot } from './types.js'

// Client-side gate mirroring the cheap half of the server's validation:
// never submit a day at or before the last observed one, nor past the
// season, nor a malformed count. Everything else is the server's call.
export function validateObservation(
  day: number,
  count: number,
  lastObservedDay: number,
  season: number,
): string | null {
  if (!Number.isInteger(day)) return 'day must be an integer'
  if (day <= lastObservedDay) return `day must be after day ${lastObservedDay}`
  if (day > season) return `day is past the season (ends day ${season})`
  if (!Number.isInteger(count) || count < 0) return 'count must be a non-negative integer'
  return null
}

export function exportHref(snapshot: SessionSnapshot): string {
  return 'data:application/json;charset=utf-8,' + encodeURIComponent(JSON.stringify(snapshot, null, 2))
}

export interface ObserveOptions {
  busy: boolean
  onSubmit: (day: number, count: number, override: boolean) => void
}

export function renderObservePanel(root: HTMLElement, snapshot: SessionSnapshot, opts: ObserveOptions): void {
  if (isTerminal(snapshot.status)) {
    const days = snapshot.observations.map(o => o.day).join(', ')
    root.innerHTML = `
      <div class="banner terminal" id="terminal-banner">
        Campaign finished (${snapshot.status}). Sampled days: ${days}.
      </div>
      <a id="export" download="${snapshot.session_id}.json" href="${exportHref(snapshot)}">
        Export session JSON
      </a>`
    return
  }

  const pending = snapshot.pending
  if (pending === null) {
    root.innerHTML = `<p class="waiting" id="fit-progress">Fitting the posterior and scoring the window&hellip;</p>`
    return
  }

  const last = snapshot.observations[snapshot.observations.length - 1]
  root.innerHTML = `
    <form id="observe" novalidate>
      <p>
        Recommended sampling day:
        <strong id="recommended-day">${pending.day}</strong>
        (step ${pending.step}, window ${pending.window[0]}&ndash;${pending.window[pending.window.length - 1]})
      </p>
      <label class="field">
        <span>day</span>
        <input name="day" type="number" step="1" value="${pending.day}" readonly>
      </label>
      <label class="field checkbox">
        <input name="override" type="checkbox">
        <span>sample a different day (logged as an override)</span>
      </label>
      <label class="field">
        <span>observed count</span>
        <input name="count" type="number" step="1" min="0" value="">
      </label>
      <span class="field-error" data-for="observe" hidden></span>
      <button type="submit" id="observe-submit"${opts.busy ? ' disabled' : ''}>Record observation</button>
    </form>`

  const form = root.querySelector<HTMLFormElement>('#observe')!
  const dayInput = form.elements.namedItem('day') as HTMLInputElement
  const countInput = form.elements.namedItem('count') as HTMLInputElement
  const overrideBox = form.elements.namedItem('override') as HTMLInputElement
  const error = root.querySelector<HTMLElement>('.field-error')!

  overrideBox.addEventListener('change', () => {
    if (overrideBox.checked) {
      dayInput.removeAttribute('readonly')
    } else {
      dayInput.setAttribute('readonly', '')
      dayInput.value = String(pending.day)
    }
  })

  form.addEventListener('submit', event => {
    event.preventDefault()
    if (opts.busy) return
    const day = Number(dayInput.value)
    const count = Number(countInput.value)
    const message = validateObservation(day, count, last.day, snapshot.cfg.season)
    if (message !== null) {
      error.textContent = message
      error.removeAttribute('hidden')
      return
    }
    error.setAttribute('hidden', '')
    opts.onSubmit(day, count, overrideBox.checked)
  })
}
