import { describe, expect, it } from 'vitest';

import { badgeFor, detailsText, escapeHtml, feedbackListHtml, segments, sentenceHtml } from '../src/render.js';
import { GRAMMATICAL_RESPONSE, LEARNER_RESPONSE, NO_PARSE_RESPONSE } from './fixtures.js';

describe('segments', () => {
  it('slices strictly by the response offsets', () => {
    const segs = segments(LEARNER_RESPONSE.sentence, LEARNER_RESPONSE.feedback);
    expect(segs.map((s) => s.text)).toEqual(['mis abuelos son personas ', 'famosos']);
    expect(segs[0].feedback).toBeNull();
    expect(segs[1].feedback?.category).toBe('gender-agreement');
  });

  it('no feedback, one plain segment', () => {
    const segs = segments('hola', []);
    expect(segs).toEqual([{ text: 'hola', feedback: null }]);
  });

  it('handles spans mid-sentence and multiple items', () => {
    const sentence = 'las abuelos son personas famosos';
    const feedback = [
      { category: 'c', start: 4, end: 11, surface: 'abuelos', expected: 'abuelas', message: 'm1' },
      { category: 'c', start: 25, end: 32, surface: 'famosos', expected: 'famosas', message: 'm2' },
    ];
    const segs = segments(sentence, feedback);
    expect(segs.map((s) => s.text).join('')).toBe(sentence);
    expect(segs.filter((s) => s.feedback).map((s) => s.text)).toEqual([
      'abuelos',
      'famosos',
    ]);
  });

  it('clamps out-of-range offsets instead of throwing', () => {
    const segs = segments('corto', [
      { category: 'c', start: 2, end: 99, surface: 'x', expected: null, message: 'm' },
    ]);
    expect(segs.map((s) => s.text).join('')).toBe('corto');
  });
});

describe('html rendering', () => {
  it('underlines exactly the feedback span', () => {
    const html = sentenceHtml(LEARNER_RESPONSE);
    expect(html).toContain('<mark class="error-span"');
    expect(html).toContain('>famosos</mark>');
    expect(html).not.toContain('>personas</mark>');
  });

  it('escapes markup in sentences and messages', () => {
    const html = sentenceHtml({
      ...GRAMMATICAL_RESPONSE,
      sentence: '<script>alert(1)</script>',
    });
    expect(html).not.toContain('<script>');
    expect(html).toContain('&lt;script&gt;');
    expect(escapeHtml('a & "b"')).toBe('a &amp; &quot;b&quot;');
  });

  it('feedback list shows category, surface and expected form', () => {
    const html = feedbackListHtml(LEARNER_RESPONSE.feedback);
    expect(html).toContain('[gender-agreement]');
    expect(html).toContain('<strong>famosos</strong>');
    expect(html).toContain('famosas');
    expect(feedbackListHtml([])).toBe('');
  });
});

describe('badges and details', () => {
  it('maps each verdict to a badge', () => {
    expect(badgeFor('grammatical').label).toBe('Grammatical');
    expect(badgeFor('learner').className).toBe('badge-warn');
    expect(badgeFor('no_parse').label).toBe('Not understood');
  });

  it('details drawer shows dependencies and derivation verbatim', () => {
    const text = detailsText(LEARNER_RESPONSE);
    expect(text).toContain('_famoso_a -ARG1-> _persona_n');
    expect(text).toContain('head-subj [0,5]');
    expect(text).toContain('grammar: learner-');
  });

  it('details drawer degrades when sections are absent', () => {
    const text = detailsText(NO_PARSE_RESPONSE);
    expect(text).toContain('grammar: learner-');
    expect(text).not.toContain('dependencies:');
  });
});
