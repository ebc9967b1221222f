// DOM glue: wires the session store to the page. All linguistics stays
// server-side; this file only moves strings around.

import { CoachClient, resolveBaseUrl } from './api.js';
import { badgeFor, detailsText, feedbackListHtml, sentenceHtml } from './render.js';
import { Session, SessionState } from './state.js';

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function boot(): Session {
  const client = new CoachClient(resolveBaseUrl());
  const session = new Session(client);

  const input = el<HTMLInputElement>('sentence');
  const submit = el<HTMLButtonElement>('submit');
  const badge = el<HTMLSpanElement>('badge');
  const result = el<HTMLDivElement>('result');
  const feedback = el<HTMLDivElement>('feedback');
  const applyRow = el<HTMLDivElement>('apply-row');
  const applyButton = el<HTMLButtonElement>('apply');
  const corrected = el<HTMLSpanElement>('corrected');
  const banner = el<HTMLDivElement>('banner');
  const history = el<HTMLOListElement>('history');
  const details = el<HTMLPreElement>('details-text');

  input.addEventListener('input', () => session.setText(input.value));
  submit.addEventListener('click', () => void session.submit());
  input.addEventListener('keydown', (event) => {
    if (event.key === 'Enter') void session.submit();
  });
  applyButton.addEventListener('click', () => void session.applyCorrection());

  session.subscribe((state: SessionState) => {
    if (input.value !== state.current) input.value = state.current;
    submit.disabled = state.pending || !state.current.trim();
    applyButton.disabled = state.pending;

    banner.textContent = state.error ?? '';
    banner.hidden = !state.error;

    const last = state.last;
    if (!last) {
      badge.textContent = '';
      result.innerHTML = '';
      feedback.innerHTML = '';
      applyRow.hidden = true;
      details.textContent = '';
    } else {
      const b = badgeFor(last.verdict);
      badge.textContent = b.label;
      badge.className = `badge ${b.className}`;
      result.innerHTML = sentenceHtml(last);
      feedback.innerHTML = feedbackListHtml(last.feedback);
      applyRow.hidden = !last.corrected;
      corrected.textContent = last.corrected ?? '';
      details.textContent = detailsText(last);
    }

    history.innerHTML = state.history
      .map(
        (entry) =>
          `<li><code>${entry.submitted
            .replace(/&/g, '&amp;')
            .replace(/</g, '&lt;')}</code> &mdash; ${entry.verdict}</li>`,
      )
      .join('');
  });

  return session;
}

if (typeof document !== 'undefined' && document.getElementById('sentence')) {
  boot();
}
