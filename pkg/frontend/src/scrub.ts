/** Single-flight thumbnail loader.
 *
 * Rapid scrubbing fires many requests; only one may be in flight, and
 * intermediate targets collapse to the latest one.
 */

export class ThumbLoader<T> {
  private inflight = false;
  private pending: number | null = null;
  fetchCount = 0;

  constructor(
    private readonly fetcher: (t: number) => Promise<T>,
    private readonly onResult: (t: number, result: T) => void,
    private readonly onError: (t: number, err: unknown) => void = () => {},
  ) {}

  request(t: number): void {
    if (this.inflight) {
      this.pending = t; // coalesce: only the latest target survives
      return;
    }
    void this.start(t);
  }

  private async start(t: number): Promise<void> {
    this.inflight = true;
    this.fetchCount += 1;
    try {
      const result = await this.fetcher(t);
      this.onResult(t, result);
    } catch (err) {
      this.onError(t, err);
    } finally {
      this.inflight = false;
      if (this.pending !== null) {
        const next = this.pending;
        this.pending = null;
        void this.start(next);
      }
    }
  }
}
