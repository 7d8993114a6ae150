/**
 * Incremental parser for a text/event-stream body.
 *
 * Used instead of EventSource so the same code runs in tests (reading a
 * fetch body) and in the browser, and so heartbeats are observable.
 */

export interface StreamEvent {
  event: string;
  data: unknown;
}

export class SseParser {
  private buffer = "";

  /** Feed a chunk of stream text; returns any events completed by it. */
  feed(chunk: string): StreamEvent[] {
    this.buffer += chunk;
    const events: StreamEvent[] = [];
    let sep: number;
    while ((sep = this.buffer.indexOf("\n\n")) >= 0) {
      const block = this.buffer.slice(0, sep);
      this.buffer = this.buffer.slice(sep + 2);
      const parsed = parseBlock(block);
      if (parsed) events.push(parsed);
    }
    return events;
  }
}

function parseBlock(block: string): StreamEvent | null {
  let event = "message";
  const dataLines: string[] = [];
  for (const line of block.split("\n")) {
    if (line.startsWith("event: ")) event = line.slice(7).trim();
    else if (line.startsWith("data: ")) dataLines.push(line.slice(6));
    // comments and unknown fields are ignored per the SSE format
  }
  if (dataLines.length === 0) return null;
  let data: unknown = dataLines.join("\n");
  try {
    data = JSON.parse(dataLines.join("\n"));
  } catch {
    /* non-JSON data stays a string */
  }
  return { event, data };
}
