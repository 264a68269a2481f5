import type {
  EpisodeDetail,
  EpisodeList,
  ExperienceSummary,
  MovingAverageSeries,
  VerdictResponse,
  VerdictValue,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`${status}: ${detail}`);
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ReviewApi {
  constructor(private base: string = "") {}

  listEpisodes(status?: "pending" | "judged"): Promise<EpisodeList> {
    const query = status ? `?status=${status}` : "";
    return request<EpisodeList>(`${this.base}/api/episodes${query}`);
  }

  getEpisode(episodeId: string): Promise<EpisodeDetail> {
    return request<EpisodeDetail>(`${this.base}/api/episodes/${encodeURIComponent(episodeId)}`);
  }

  submitVerdict(
    episodeId: string,
    verdict: VerdictValue,
    submittedBy = "console",
  ): Promise<VerdictResponse> {
    return request<VerdictResponse>(
      `${this.base}/api/episodes/${encodeURIComponent(episodeId)}/verdict`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ verdict, submitted_by: submittedBy }),
      },
    );
  }

  getExperience(taskId: string): Promise<ExperienceSummary> {
    return request<ExperienceSummary>(`${this.base}/api/experience/${encodeURIComponent(taskId)}`);
  }

  getMovingAverage(taskId: string): Promise<MovingAverageSeries> {
    return request<MovingAverageSeries>(
      `${this.base}/api/metrics/${encodeURIComponent(taskId)}/moving-average`,
    );
  }
}
