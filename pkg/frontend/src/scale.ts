// Linear coordinate scaling for the SVG chart. This is the only numerical
// work the dashboard does; every plotted value arrives from the API.

export type Scale = (value: number) => number

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain
  const [r0, r1] = range
  const span = d1 - d0
  if (span === 0) return () => (r0 + r1) / 2
  return value => r0 + ((value - d0) / span) * (r1 - r0)
}

export function upperBound(...series: number[][]): number {
  let hi = 0
  for (const values of series) {
    for (const v of values) if (v > hi) hi = v
  }
  return hi
}

// round tick positions covering [0, hi]
export function ticks(hi: number, count: number): number[] {
  if (hi <= 0 || count < 1) return [0]
  const rawStep = hi / count
  const magnitude = 10 ** Math.floor(Math.log10(rawStep))
  const candidates = [1, 2, 5, 10]
  let step = magnitude
  for (const c of candidates) {
    if (c * magnitude >= rawStep) {
      step = c * magnitude
      break
    }
  }
  const out: number[] = []
  for (let v = 0; v <= hi + step * 1e-9; v += step) out.push(Number(v.toPrecision(12)))
  return out
}
