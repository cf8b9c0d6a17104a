// WebSocket connection with automatic retry.  The socket factory is
// injectable so the state machine is testable without a browser.

export type SocketLike = {
  onopen: ((ev: unknown) => void) | null;
  onclose: ((ev: unknown) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  send(data: string): void;
  close(): void;
};

export interface ConnectionCallbacks {
  onStatus(status: "connecting" | "connected" | "disconnected"): void;
  onMessage(text: string): void;
}

const RETRY_MS = [1000, 2000, 4000, 5000];

export class Connection {
  private socket: SocketLike | null = null;
  private attempts = 0;
  private closed = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly url: string,
    private readonly callbacks: ConnectionCallbacks,
    private readonly factory: (url: string) => SocketLike = (u) =>
      new WebSocket(u) as unknown as SocketLike,
  ) {}

  open(): void {
    if (this.closed) return;
    this.callbacks.onStatus("connecting");
    let socket: SocketLike;
    try {
      socket = this.factory(this.url);
    } catch {
      this.scheduleRetry();
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      this.attempts = 0;
      this.callbacks.onStatus("connected");
    };
    socket.onmessage = (ev) => {
      if (typeof ev.data === "string") this.callbacks.onMessage(ev.data);
    };
    socket.onclose = () => {
      this.socket = null;
      if (!this.closed) {
        this.callbacks.onStatus("disconnected");
        this.scheduleRetry();
      }
    };
    socket.onerror = () => {
      // the close handler owns the retry; errors alone change nothing
    };
  }

  send(text: string): boolean {
    if (this.socket === null) return false;
    try {
      this.socket.send(text);
      return true;
    } catch {
      return false;
    }
  }

  close(): void {
    this.closed = true;
    if (this.timer !== null) clearTimeout(this.timer);
    this.socket?.close();
    this.socket = null;
  }

  private scheduleRetry(): void {
    const delay = RETRY_MS[Math.min(this.attempts, RETRY_MS.length - 1)]!;
    this.attempts += 1;
    this.timer = setTimeout(() => this.open(), delay);
  }
}
