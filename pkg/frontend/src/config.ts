// API base URL resolution, overridable without rebuilding: a ?api= query
// parameter wins and is remembered, then localStorage, then a
// <meta name="seqdes-api"> tag, then same-origin relative paths.

const STORAGE_KEY = 'seqdes-api-base'

export function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('api')
  if (fromQuery !== null) {
    window.localStorage.setItem(STORAGE_KEY, fromQuery)
    return fromQuery
  }
  const stored = window.localStorage.getItem(STORAGE_KEY)
  if (stored !== null) return stored
  const meta = document.querySelector<HTMLMetaElement>('meta[name="seqdes-api"]')
  if (meta !== null) return meta.content
  return ''
}
