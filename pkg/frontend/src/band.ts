import { linearScale, ticks, upperBound } from './scale.js'
import type { Band, Observation } from './types.js'

export interface BandChartInput {
  band: Band
  observations: Observation[]
  recommendedDay: number | null
  width?: number
  height?: number
}

const MARGIN = { left: 52, right: 16, top: 12, bottom: 30 }

function pt(x: number, y: number): string {
  return `${x.toFixed(1)},${y.toFixed(1)}`
}

// Shaded band between the lower and upper quantile series, median line on
// top, one dot per observation, a vertical marker at the recommended day.
export function bandChartSvg(input: BandChartInput): string {
  const { band, observations, recommendedDay } = input
  const width = input.width ?? 640
  const height = input.height ?? 320
  const lastDay = band.days[band.days.length - 1]
  const counts = observations.map(o => o.count)
  const yMax = upperBound(band.upper, counts)

  const x = linearScale([0, lastDay], [MARGIN.left, width - MARGIN.right])
  const y = linearScale([0, yMax], [height - MARGIN.bottom, MARGIN.top])

  const upper = band.days.map((d, i) => pt(x(d), y(band.upper[i])))
  const lowerBack = band.days.map((d, i) => pt(x(d), y(band.lower[i]))).reverse()
  const area = `M ${upper.join(' L ')} L ${lowerBack.join(' L ')} Z`
  const median = band.days.map((d, i) => pt(x(d), y(band.median[i]))).join(' ')

  const dots = observations
    .map(
      o =>
        `<circle class="obs" data-day="${o.day}" data-count="${o.count}" ` +
        `cx="${x(o.day).toFixed(1)}" cy="${y(o.count).toFixed(1)}" r="3.5"></circle>`,
    )
    .join('')

  const marker =
    recommendedDay === null
      ? ''
      : `<line class="rec-marker" data-day="${recommendedDay}" ` +
        `x1="${x(recommendedDay).toFixed(1)}" x2="${x(recommendedDay).toFixed(1)}" ` +
        `y1="${MARGIN.top}" y2="${height - MARGIN.bottom}"></line>`

  const xTicks = ticks(lastDay, 6)
    .map(
      v =>
        `<g class="tick-x" transform="translate(${x(v).toFixed(1)},${height - MARGIN.bottom})">` +
        `<line y2="5"></line><text y="18" text-anchor="middle">${v}</text></g>`,
    )
    .join('')
  const yTicks = ticks(yMax, 5)
    .map(
      v =>
        `<g class="tick-y" transform="translate(${MARGIN.left},${y(v).toFixed(1)})">` +
        `<line x2="-5"></line><text x="-8" text-anchor="end" dy="0.32em">${v}</text></g>`,
    )
    .join('')

  return (
    `<svg class="band-chart" viewBox="0 0 ${width} ${height}" role="img" ` +
    `aria-label="predictive band, ${band.mode}">` +
    `<path class="band-area" d="${area}"></path>` +
    `<polyline class="band-median" fill="none" points="${median}"></polyline>` +
    `${marker}${dots}` +
    `<line class="axis" x1="${MARGIN.left}" x2="${width - MARGIN.right}" ` +
    `y1="${height - MARGIN.bottom}" y2="${height - MARGIN.bottom}"></line>` +
    `<line class="axis" x1="${MARGIN.left}" x2="${MARGIN.left}" ` +
    `y1="${MARGIN.top}" y2="${height - MARGIN.bottom}"></line>` +
    `${xTicks}${yTicks}` +
    `</svg>`
  )
}
