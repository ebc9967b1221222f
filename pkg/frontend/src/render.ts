// Pure view helpers: split the submitted sentence into plain and
// underlined segments straight from the response offsets, and build the
// result panel's HTML. No tokenization happens here by design.

import { CoachResponse, FeedbackItem, VerdictKind } from './api.js';

export interface Segment {
  text: string;
  feedback: FeedbackItem | null;
}

export function segments(sentence: string, feedback: FeedbackItem[]): Segment[] {
  const sorted = [...feedback].sort((a, b) => a.start - b.start);
  const out: Segment[] = [];
  let cursor = 0;
  for (const item of sorted) {
    const start = Math.max(cursor, Math.min(item.start, sentence.length));
    const end = Math.max(start, Math.min(item.end, sentence.length));
    if (start > cursor) out.push({ text: sentence.slice(cursor, start), feedback: null });
    if (end > start) out.push({ text: sentence.slice(start, end), feedback: item });
    cursor = end;
  }
  if (cursor < sentence.length) out.push({ text: sentence.slice(cursor), feedback: null });
  return out;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export const BADGES: Record<VerdictKind, { label: string; className: string }> = {
  grammatical: { label: 'Grammatical', className: 'badge-good' },
  learner: { label: 'Needs work', className: 'badge-warn' },
  no_parse: { label: 'Not understood', className: 'badge-unknown' },
};

export function badgeFor(verdict: VerdictKind): { label: string; className: string } {
  return BADGES[verdict] ?? { label: verdict, className: 'badge-unknown' };
}

export function sentenceHtml(response: CoachResponse): string {
  const parts = segments(response.sentence, response.feedback).map((segment) => {
    const text = escapeHtml(segment.text);
    if (!segment.feedback) return `<span>${text}</span>`;
    const title = escapeHtml(segment.feedback.message);
    return `<mark class="error-span" title="${title}">${text}</mark>`;
  });
  return parts.join('');
}

export function feedbackListHtml(feedback: FeedbackItem[]): string {
  if (!feedback.length) return '';
  const items = feedback.map((item) => {
    const expected = item.expected
      ? ` <span class="expected">&rarr; ${escapeHtml(item.expected)}</span>`
      : '';
    return (
      `<li><span class="category">[${escapeHtml(item.category)}]</span> ` +
      `<strong>${escapeHtml(item.surface)}</strong>${expected}: ` +
      `${escapeHtml(item.message)}</li>`
    );
  });
  return `<ul class="feedback">${items.join('')}</ul>`;
}

export function detailsText(response: CoachResponse): string {
  const blocks: string[] = [];
  if (response.dependencies?.length) {
    blocks.push(`dependencies:\n${response.dependencies.join('\n')}`);
  }
  if (response.derivation) {
    blocks.push(`derivation:\n${response.derivation}`);
  }
  blocks.push(`grammar: ${response.grammar_version}`);
  return blocks.join('\n\n');
}
