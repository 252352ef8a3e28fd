/** Keyboard-only review flow: throughput matters across thousands of pairs. */

export type KeyAction = "accept" | "reject" | "skip" | "toggle-diagnostics";

const BINDINGS: Record<string, KeyAction> = {
  a: "accept",
  j: "accept",
  r: "reject",
  k: "reject",
  s: "skip",
  " ": "skip",
  d: "toggle-diagnostics",
};

export function actionForKey(key: string, target?: { tagName?: string }): KeyAction | null {
  const tag = target?.tagName?.toUpperCase() ?? "";
  if (tag === "INPUT" || tag === "TEXTAREA" || tag === "SELECT") {
    return null; // never steal keys from form fields
  }
  return BINDINGS[key.toLowerCase()] ?? BINDINGS[key] ?? null;
}
