/** Bootstrap: read the server-provided config and start the app. */

import { fetchConfig } from './api.js';
import { AnnotationApp } from './app.js';

function annotatorId(): string {
  const stored = window.localStorage.getItem('annotator');
  if (stored) {
    return stored;
  }
  const entered =
    window.prompt('Annotator id (any short name):') ||
    `anon-${Math.random().toString(36).slice(2, 8)}`;
  window.localStorage.setItem('annotator', entered);
  return entered;
}

async function boot(): Promise<void> {
  const root = document.getElementById('app');
  if (!root) {
    return;
  }
  try {
    const config = await fetchConfig();
    const app = new AnnotationApp(root, config, annotatorId());
    await app.start();
  } catch {
    root.innerHTML =
      '<section class="error-banner"><p>Could not load the session ' +
      'configuration. Is the annotation server running?</p></section>';
  }
}

void boot();
