// Captured wire-format responses from the coaching service for the
// canonical learner sentence and its corrected form.

import { CoachResponse } from '../src/api.js';

export const LEARNER_RESPONSE: CoachResponse = {
  sentence: 'mis abuelos son personas famosos',
  verdict: 'learner',
  feedback: [
    {
      category: 'gender-agreement',
      start: 25,
      end: 32,
      surface: 'famosos',
      expected: 'famosas',
      message: "'famosos' does not agree in gender with 'personas'; use 'famosas'.",
    },
  ],
  corrected: 'mis abuelos son personas famosas',
  dependencies: [
    '_mi_q -ARG1-> _abuelo_n',
    '_ser_v -ARG1-> _abuelo_n',
    '_ser_v -ARG2-> _persona_n',
    '_famoso_a -ARG1-> _persona_n',
  ],
  derivation: 'head-subj [0,5]\n  det-head [0,2]',
  stats: {},
  grammar_version: 'learner-d44dcbc613c7',
};

export const GRAMMATICAL_RESPONSE: CoachResponse = {
  sentence: 'mis abuelos son personas famosas',
  verdict: 'grammatical',
  feedback: [],
  corrected: null,
  dependencies: [],
  derivation: null,
  stats: {},
  grammar_version: 'learner-d44dcbc613c7',
};

export const NO_PARSE_RESPONSE: CoachResponse = {
  sentence: 'abuelos personas son famosas mis',
  verdict: 'no_parse',
  feedback: [],
  corrected: null,
  dependencies: null,
  derivation: null,
  stats: {},
  grammar_version: 'learner-d44dcbc613c7',
};
