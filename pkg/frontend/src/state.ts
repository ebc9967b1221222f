// Session state machine. One in-flight request at a time (pending
// guard); history is append-only and grows once per completed
// submission; a failed request leaves history and input untouched.

import { CoachClient, CoachResponse, ServiceError } from './api.js';

export interface HistoryEntry {
  submitted: string;
  verdict: string;
}

export interface SessionState {
  current: string;
  last: CoachResponse | null;
  history: HistoryEntry[];
  pending: boolean;
  error: string | null;
}

export type Listener = (state: SessionState) => void;

export class Session {
  private state: SessionState = {
    current: '',
    last: null,
    history: [],
    pending: false,
    error: null,
  };
  private listeners: Listener[] = [];

  constructor(private readonly client: CoachClient) {}

  snapshot(): SessionState {
    return {
      ...this.state,
      history: [...this.state.history],
    };
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    const snap = this.snapshot();
    for (const listener of this.listeners) listener(snap);
  }

  setText(text: string): void {
    this.state.current = text;
    this.emit();
  }

  /** Submit the current text. No-op on empty text or while a request is
   * already pending. Resolves when the state has settled. */
  async submit(): Promise<void> {
    const text = this.state.current.trim();
    if (!text || this.state.pending) return;
    this.state.pending = true;
    this.state.error = null;
    this.emit();
    try {
      const response = await this.client.coach(text, {
        include_dependencies: true,
        include_derivation: true,
      });
      this.state.last = response;
      this.state.history.push({ submitted: text, verdict: response.verdict });
      this.state.pending = false;
      this.emit();
    } catch (err) {
      // non-blocking failure: banner text only, history and input intact
      this.state.pending = false;
      this.state.error =
        err instanceof ServiceError ? err.message : `unexpected: ${String(err)}`;
      this.emit();
    }
  }

  /** Replace the input with the suggested correction and resubmit.
   * Ignored when pending or when there is nothing to apply. */
  async applyCorrection(): Promise<void> {
    const corrected = this.state.last?.corrected;
    if (!corrected || this.state.pending) return;
    this.state.current = corrected;
    this.emit();
    await this.submit();
  }
}
