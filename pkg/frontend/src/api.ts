/** Thin typed client for the /v1 lighting-control service. */

export interface InputStateBody {
  dgi: number;
  age: number;
  activity: string | number;
  chronotype: string | number;
}

export interface FeedbackResult {
  reward: number;
  td_error: number;
  next_suggestion: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}/v1${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    if (!resp.ok) {
      let detail = text;
      try {
        detail = JSON.stringify(JSON.parse(text).detail);
      } catch {
        /* non-JSON error body: show it raw */
      }
      throw new ApiError(resp.status, detail);
    }
    return JSON.parse(text) as T;
  }

  createProfile(
    age: number,
    chronotype: string | number,
    config?: Record<string, number>,
  ): Promise<{ profile_id: string }> {
    return this.request("POST", "/profiles", { age, chronotype, config });
  }

  openSession(
    profileId: string,
    inputState: InputStateBody,
  ): Promise<{ token: string; suggestion: number }> {
    return this.request("POST", "/sessions", {
      profile_id: profileId,
      input_state: inputState,
    });
  }

  sendFeedback(token: string, correctedIntensity: number): Promise<FeedbackResult> {
    return this.request("POST", `/sessions/${token}/feedback`, {
      corrected_intensity: correctedIntensity,
    });
  }

  changeContext(token: string, inputState: InputStateBody): Promise<{ suggestion: number }> {
    return this.request("POST", `/sessions/${token}/context`, {
      input_state: inputState,
    });
  }

  closeSession(token: string): Promise<{ closed: boolean }> {
    return this.request("DELETE", `/sessions/${token}`);
  }

  streamUrl(token: string): string {
    return `${this.baseUrl}/v1/sessions/${token}/stream`;
  }
}
