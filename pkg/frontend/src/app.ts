/**
 * The annotation screen: one source, two unlabeled translations, three
 * buttons. Buttons stay disabled from click to server ack so a task can
 * never produce two judgments; a failed submission keeps the choice and
 * offers a retry without losing the task on screen.
 */

import {
  AppConfig,
  Choice,
  DuplicateJudgmentError,
  TaskPayload,
  fetchNextTask,
  isDone,
  submitJudgment,
  tallyUrl,
} from './api.js';

const KEY_CHOICES: Record<string, Choice> = {
  '1': 'left',
  '2': 'right',
  '0': 'equal',
};

export class AnnotationApp {
  private current: TaskPayload | null = null;
  private pendingChoice: Choice | null = null;
  private busy = false;
  private inflight: Promise<void> | null = null;
  private readonly keyHandler = (event: KeyboardEvent) => {
    const choice = KEY_CHOICES[event.key];
    if (choice) {
      this.choose(choice);
    }
  };

  constructor(
    private readonly root: HTMLElement,
    private readonly config: AppConfig,
    private readonly annotator: string,
  ) {}

  async start(): Promise<void> {
    document.addEventListener('keydown', this.keyHandler);
    await this.loadNext();
  }

  stop(): void {
    document.removeEventListener('keydown', this.keyHandler);
  }

  /** Resolves once any in-flight submission or load has finished. */
  async settle(): Promise<void> {
    while (this.inflight) {
      const waiting = this.inflight;
      await waiting;
      if (this.inflight === waiting) {
        this.inflight = null;
      }
    }
  }

  choose(choice: Choice): void {
    if (this.busy || !this.current) {
      return;
    }
    this.busy = true;
    this.inflight = this.submitCurrent(choice);
  }

  retry(): void {
    if (this.pendingChoice && this.current && !this.busy) {
      const choice = this.pendingChoice;
      this.renderTask(this.current);
      this.choose(choice);
    }
  }

  private async submitCurrent(choice: Choice): Promise<void> {
    const task = this.current!;
    this.pendingChoice = choice;
    this.setButtonsDisabled(true);
    this.setNotice('Saving…');
    try {
      await submitJudgment(this.config, task.task_id, this.annotator, choice);
      this.pendingChoice = null;
      await this.loadNext();
    } catch (error) {
      if (error instanceof DuplicateJudgmentError) {
        this.pendingChoice = null;
        await this.loadNext();
        this.setNotice('That task was already judged; moved to the next one.');
      } else {
        this.renderSubmitRetry();
      }
    } finally {
      this.busy = false;
    }
  }

  private async loadNext(): Promise<void> {
    try {
      const next = await fetchNextTask(this.config, this.annotator);
      if (isDone(next)) {
        this.current = null;
        this.renderDone(next.progress.total);
      } else {
        this.current = next;
        this.renderTask(next);
      }
    } catch {
      this.renderFetchRetry();
    }
  }

  // -- rendering ----------------------------------------------------------

  private renderTask(task: TaskPayload): void {
    this.root.innerHTML = `
      <header class="bar">
        <span class="title">Which translation is more literal?</span>
        <span class="progress" data-testid="progress"></span>
      </header>
      <section class="source">
        <h2>Source</h2>
        <p data-testid="source"></p>
      </section>
      <div class="panes">
        <section class="pane">
          <h2>Translation A</h2>
          <p data-testid="left"></p>
        </section>
        <section class="pane">
          <h2>Translation B</h2>
          <p data-testid="right"></p>
        </section>
      </div>
      <div class="buttons">
        <button type="button" data-choice="left">A is more literal <kbd>1</kbd></button>
        <button type="button" data-choice="equal">Equal <kbd>0</kbd></button>
        <button type="button" data-choice="right">B is more literal <kbd>2</kbd></button>
      </div>
      <p class="notice" role="status" data-testid="notice"></p>
    `;
    this.text('source', task.source);
    this.text('left', task.left);
    this.text('right', task.right);
    this.text('progress', `${task.progress.done} / ${task.progress.total}`);
    for (const button of this.root.querySelectorAll<HTMLButtonElement>('button[data-choice]')) {
      button.addEventListener('click', () => {
        this.choose(button.dataset.choice as Choice);
      });
    }
  }

  private renderDone(total: number): void {
    this.root.innerHTML = `
      <section class="done">
        <h1>All done</h1>
        <p data-testid="done-message"></p>
        <p><a data-testid="tally-link">View the tally</a></p>
      </section>
    `;
    this.text('done-message', `You have judged all ${total} tasks in this session.`);
    const link = this.root.querySelector<HTMLAnchorElement>('[data-testid="tally-link"]')!;
    link.href = tallyUrl(this.config);
  }

  private renderFetchRetry(): void {
    this.root.innerHTML = `
      <section class="error-banner" data-testid="fetch-retry">
        <p>Could not reach the server. Your progress is safe.</p>
        <button type="button" data-testid="retry-fetch">Try again</button>
      </section>
    `;
    this.root
      .querySelector('[data-testid="retry-fetch"]')!
      .addEventListener('click', () => {
        this.inflight = this.loadNext();
      });
  }

  private renderSubmitRetry(): void {
    if (this.current) {
      this.renderTask(this.current);
    }
    this.setButtonsDisabled(true);
    const notice = this.root.querySelector('[data-testid="notice"]');
    if (notice) {
      notice.innerHTML =
        'Could not save your choice. It is kept locally. ' +
        '<button type="button" data-testid="retry-submit">Retry</button>';
      notice
        .querySelector('[data-testid="retry-submit"]')!
        .addEventListener('click', () => this.retry());
    }
  }

  private setButtonsDisabled(disabled: boolean): void {
    for (const button of this.root.querySelectorAll<HTMLButtonElement>('button[data-choice]')) {
      button.disabled = disabled;
    }
  }

  private setNotice(message: string): void {
    const notice = this.root.querySelector('[data-testid="notice"]');
    if (notice) {
      notice.textContent = message;
    }
  }

  private text(testId: string, value: string): void {
    const node = this.root.querySelector(`[data-testid="${testId}"]`);
    if (node) {
      node.textContent = value;
    }
  }
}
