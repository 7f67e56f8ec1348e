import { describe, expect, it } from "vitest";

import { InputError, column, parseCsv, requireColumns } from "../src/csv";

describe("parseCsv", () => {
  it("parses a numeric table", () => {
    const t = parseCsv("a,b\n1,2\n3,4.5\n");
    expect(t.columns).toEqual(["a", "b"]);
    expect(t.rows).toEqual([
      [1, 2],
      [3, 4.5],
    ]);
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("")).toThrow(InputError);
    expect(() => parseCsv("a,b\n")).toThrow(/no data rows/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrow(/expected 2 fields/);
  });

  it("rejects non-numeric fields", () => {
    expect(() => parseCsv("a,b\n1,x\n")).toThrow(/non-numeric/);
  });
});

describe("column access", () => {
  const t = parseCsv("t[s],b\n0,1\n1,2\n");

  it("extracts by name", () => {
    expect(column(t, "b")).toEqual([1, 2]);
  });

  it("reports missing columns with context", () => {
    expect(() => column(t, "omega[rad/s]", "pulse.csv")).toThrow(/pulse.csv: missing column 'omega/);
    expect(() => requireColumns(t, ["t[s]", "nope"])).toThrow(InputError);
  });
});
