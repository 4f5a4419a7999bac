/**
 * Typed client for the annotation server's JSON API.
 *
 * The server never sends system names; tasks arrive as anonymous
 * left/right texts and the choice goes back as left/right/equal.
 */

export type Choice = 'left' | 'right' | 'equal';

export interface Progress {
  done: number;
  total: number;
}

export interface TaskPayload {
  task_id: string;
  source: string;
  left: string;
  right: string;
  progress: Progress;
}

export interface DoneMarker {
  done: true;
  progress: Progress;
}

export type NextResponse = TaskPayload | DoneMarker;

export interface AppConfig {
  apiBase: string;
  session: string;
}

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
    this.name = 'ApiError';
  }
}

export class DuplicateJudgmentError extends ApiError {
  constructor(message: string) {
    super(message, 409);
    this.name = 'DuplicateJudgmentError';
  }
}

export function isDone(response: NextResponse): response is DoneMarker {
  return (response as DoneMarker).done === true;
}

export async function fetchConfig(base = ''): Promise<AppConfig> {
  const resp = await fetch(`${base}/config.json`);
  if (!resp.ok) {
    throw new ApiError('could not load configuration', resp.status);
  }
  return (await resp.json()) as AppConfig;
}

export async function fetchNextTask(
  config: AppConfig,
  annotator: string,
): Promise<NextResponse> {
  const url =
    `${config.apiBase}/api/session/${encodeURIComponent(config.session)}` +
    `/next?annotator=${encodeURIComponent(annotator)}`;
  const resp = await fetch(url);
  if (!resp.ok) {
    throw new ApiError('could not fetch the next task', resp.status);
  }
  return (await resp.json()) as NextResponse;
}

export async function submitJudgment(
  config: AppConfig,
  taskId: string,
  annotator: string,
  choice: Choice,
): Promise<void> {
  const resp = await fetch(`${config.apiBase}/api/judgment`, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify({ task_id: taskId, annotator, choice }),
  });
  if (resp.status === 409) {
    throw new DuplicateJudgmentError('this task was already judged');
  }
  if (!resp.ok) {
    throw new ApiError('could not save the judgment', resp.status);
  }
}

export function tallyUrl(config: AppConfig): string {
  return (
    `${config.apiBase}/api/session/` +
    `${encodeURIComponent(config.session)}/tally`
  );
}
