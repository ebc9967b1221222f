// Wire types and client for the coaching service. The UI consumes the
// HTTP/JSON contract verbatim: spans are character offsets into the
// submitted sentence and are rendered without re-tokenizing.

export interface FeedbackItem {
  category: string;
  start: number;
  end: number;
  surface: string;
  expected: string | null;
  message: string;
}

export type VerdictKind = 'grammatical' | 'learner' | 'no_parse';

export interface CoachResponse {
  sentence: string;
  verdict: VerdictKind;
  feedback: FeedbackItem[];
  corrected: string | null;
  dependencies: string[] | null;
  derivation: string | null;
  stats: Record<string, unknown>;
  grammar_version: string;
}

export interface CoachRequestOptions {
  supertag_k?: number;
  include_dependencies?: boolean;
  include_derivation?: boolean;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

const BASE_URL_KEY = 'gramcoach.baseUrl';
const DEFAULT_BASE_URL = 'http://127.0.0.1:8099';

/** Base URL resolution: ?service= query parameter, then localStorage,
 * then the default dev address. */
export function resolveBaseUrl(
  search: string = typeof location === 'undefined' ? '' : location.search,
  storage: Pick<Storage, 'getItem' | 'setItem'> | null =
    typeof localStorage === 'undefined' ? null : localStorage,
): string {
  const fromQuery = new URLSearchParams(search).get('service');
  if (fromQuery) {
    storage?.setItem(BASE_URL_KEY, fromQuery);
    return stripSlash(fromQuery);
  }
  const stored = storage?.getItem(BASE_URL_KEY);
  return stripSlash(stored || DEFAULT_BASE_URL);
}

function stripSlash(url: string): string {
  return url.endsWith('/') ? url.slice(0, -1) : url;
}

export class CoachClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async coach(sentence: string, options: CoachRequestOptions = {}): Promise<CoachResponse> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/v1/coach`, {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify({ sentence, options }),
      });
    } catch (err) {
      throw new ServiceError(`service unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      let detail = `${response.status}`;
      try {
        const body = (await response.json()) as { error?: string };
        if (body.error) detail = body.error;
      } catch {
        // keep the status code
      }
      throw new ServiceError(detail, response.status);
    }
    return (await response.json()) as CoachResponse;
  }
}
