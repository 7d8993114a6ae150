import { describe, expect, it } from "vitest";

import { SseParser } from "../src/sse.js";

describe("SseParser", () => {
  it("parses a complete event block", () => {
    const events = new SseParser().feed('event: trial\ndata: {"trial": 1}\n\n');
    expect(events).toEqual([{ event: "trial", data: { trial: 1 } }]);
  });

  it("buffers events split across chunks", () => {
    const parser = new SseParser();
    expect(parser.feed("event: tri")).toEqual([]);
    expect(parser.feed('al\ndata: {"trial": 2}\n')).toEqual([]);
    const events = parser.feed("\n");
    expect(events).toEqual([{ event: "trial", data: { trial: 2 } }]);
  });

  it("yields multiple events from one chunk, in order", () => {
    const chunk =
      "event: heartbeat\ndata: {}\n\n" +
      'event: trial\ndata: {"trial": 1}\n\n' +
      "event: end\ndata: {}\n\n";
    const kinds = new SseParser().feed(chunk).map((e) => e.event);
    expect(kinds).toEqual(["heartbeat", "trial", "end"]);
  });

  it("keeps non-JSON data as a string", () => {
    const events = new SseParser().feed("data: hello\n\n");
    expect(events).toEqual([{ event: "message", data: "hello" }]);
  });

  it("ignores blocks without data", () => {
    expect(new SseParser().feed(": comment\n\n")).toEqual([]);
  });
});
