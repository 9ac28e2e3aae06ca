import { ApiClient } from './api.js'
import { Dashboard } from './app.js'
import { apiBase } from './config.js'

const root = document.getElementById('app')
if (root !== null) {
  const dashboard = new Dashboard(root, new ApiClient(apiBase()))
  void dashboard.boot()
  window.addEventListener('hashchange', () => {
    void dashboard.boot()
  })
}
