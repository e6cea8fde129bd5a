/** Trailing debounce: the callback runs once per quiescent burst. */
export function debounce(run: () => void, delayMs: number): {
  schedule: () => void;
  flush: () => void;
  cancel: () => void;
  isPending: () => boolean;
} {
  let timer: ReturnType<typeof setTimeout> | null = null;
  const schedule = () => {
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      run();
    }, delayMs);
  };
  const flush = () => {
    if (timer === null) return;
    clearTimeout(timer);
    timer = null;
    run();
  };
  const cancel = () => {
    if (timer !== null) clearTimeout(timer);
    timer = null;
  };
  return { schedule, flush, cancel, isPending: () => timer !== null };
}
