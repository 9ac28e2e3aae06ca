import type { Recommendation } from './types.js'

// Every number below is printed exactly as the API sent it (String(value)),
// so each rendered statistic is traceable to a payload field. Bar widths
// are the one exception: pixels, scaled from the same numbers.

function scoreBars(rec: Recommendation): string {
  let max = 0
  for (const s of rec.scores) if (s > max) max = s
  const rows = rec.window
    .map((day, i) => {
      const score = rec.scores[i]
      const width = max > 0 ? (score / max) * 100 : 0
      const best = day === rec.day ? ' best' : ''
      return `
        <div class="bar-row${best}" data-day="${day}">
          <span class="bar-label">day ${day}</span>
          <span class="bar-track"><span class="bar${best}" style="width:${width.toFixed(2)}%"></span></span>
          <span class="bar-value">${String(score)}</span>
        </div>`
    })
    .join('')
  return `
    <section class="panel" id="scores-panel">
      <h3>Window scores (lower is better)</h3>
      ${rows}
    </section>`
}

function frequencyTable(rec: Recommendation): string {
  if (rec.frequencies === undefined) return ''
  const rows = rec.frequencies
    .map(
      f => `
        <tr data-day="${f.day}">
          <td>${f.day}</td>
          <td>${String(f.probability)}</td>
          <td><span class="bar-track"><span class="bar" style="width:${(f.probability * 100).toFixed(2)}%"></span></span></td>
        </tr>`,
    )
    .join('')
  return `
    <section class="panel" id="frequencies-panel">
      <h3>Selection frequencies</h3>
      <table>
        <thead><tr><th>day</th><th>probability</th><th></th></tr></thead>
        <tbody>${rows}</tbody>
      </table>
    </section>`
}

function summaryTable(rec: Recommendation): string {
  const s = rec.posterior_summary
  return `
    <section class="panel" id="posterior-panel">
      <h3>Posterior fit (step ${rec.step})</h3>
      <table>
        <tbody>
          <tr><th>mean r</th><td data-stat="mean-r">${String(s.mean.r)}</td></tr>
          <tr><th>mean K</th><td data-stat="mean-k">${String(s.mean.K)}</td></tr>
          <tr><th>ESS r</th><td data-stat="ess-r">${String(s.ess.r)}</td></tr>
          <tr><th>ESS K</th><td data-stat="ess-k">${String(s.ess.K)}</td></tr>
          <tr><th>acceptance rate</th><td data-stat="acceptance">${String(s.acceptance_rate)}</td></tr>
          <tr><th>retained draws</th><td data-stat="kept">${String(s.n_kept)}</td></tr>
        </tbody>
      </table>
    </section>`
}

export function renderDiagnostics(root: HTMLElement, rec: Recommendation | null): void {
  if (rec === null) {
    root.innerHTML = ''
    return
  }
  root.innerHTML = scoreBars(rec) + frequencyTable(rec) + summaryTable(rec)
}
