import { beforeEach, describe, expect, it } from 'vitest'

import { renderDiagnostics } from '../src/diagnostics.js'
import { fixtureRecommendation } from './helpers.js'

describe('renderDiagnostics', () => {
  let root: HTMLElement

  beforeEach(() => {
    document.body.innerHTML = '<div id="root"></div>'
    root = document.getElementById('root')!
  })

  it('renders one score bar per window day, in day order', () => {
    const rec = fixtureRecommendation()
    renderDiagnostics(root, rec)

    const rows = Array.from(root.querySelectorAll<HTMLElement>('#scores-panel .bar-row'))
    expect(rows.map(r => r.dataset.day)).toEqual(['4', '5', '6', '7', '8'])
    const values = rows.map(r => r.querySelector('.bar-value')!.textContent)
    expect(values).toEqual(rec.scores.map(s => String(s)))
  })

  it('highlights the recommended day as the best bar', () => {
    renderDiagnostics(root, fixtureRecommendation())
    const best = root.querySelector<HTMLElement>('#scores-panel .bar-row.best')!
    expect(best.dataset.day).toBe('8')
  })

  it('hides the frequency panel when the payload has no frequencies field', () => {
    renderDiagnostics(root, fixtureRecommendation())
    expect(root.querySelector('#frequencies-panel')).toBeNull()
    expect(root.querySelector('#scores-panel')).not.toBeNull()
  })

  it('renders a single full bar for a deterministic criterion', () => {
    const rec = { ...fixtureRecommendation(), frequencies: [{ day: 8, probability: 1 }] }
    renderDiagnostics(root, rec)

    const rows = Array.from(root.querySelectorAll<HTMLElement>('#frequencies-panel tbody tr'))
    expect(rows).toHaveLength(1)
    expect(rows[0].dataset.day).toBe('8')
    expect(rows[0].querySelectorAll('td')[1].textContent).toBe('1')
    expect(rows[0].querySelector<HTMLElement>('.bar')!.getAttribute('style')).toContain('width:100.00%')
  })

  it('renders spread frequencies row per day', () => {
    const rec = {
      ...fixtureRecommendation(),
      frequencies: [
        { day: 4, probability: 0.12 },
        { day: 5, probability: 0.6 },
        { day: 8, probability: 0.28 },
      ],
    }
    renderDiagnostics(root, rec)

    const rows = Array.from(root.querySelectorAll<HTMLElement>('#frequencies-panel tbody tr'))
    expect(rows.map(r => r.dataset.day)).toEqual(['4', '5', '8'])
    expect(rows[1].querySelectorAll('td')[1].textContent).toBe('0.6')
  })

  it('prints posterior summary fields verbatim', () => {
    const rec = fixtureRecommendation()
    renderDiagnostics(root, rec)

    const stat = (name: string) => root.querySelector(`[data-stat="${name}"]`)!.textContent
    expect(stat('mean-r')).toBe(String(rec.posterior_summary.mean.r))
    expect(stat('mean-k')).toBe(String(rec.posterior_summary.mean.K))
    expect(stat('ess-r')).toBe(String(rec.posterior_summary.ess.r))
    expect(stat('acceptance')).toBe('0.295')
    expect(stat('kept')).toBe('800')
  })

  it('clears the panel when there is no fit yet', () => {
    renderDiagnostics(root, fixtureRecommendation())
    renderDiagnostics(root, null)
    expect(root.innerHTML).toBe('')
  })
})
