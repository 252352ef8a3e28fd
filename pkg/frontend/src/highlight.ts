/** Minimal Cypher syntax highlighting: safe HTML out, no DOM dependencies. */

const KEYWORDS = new Set([
  "MATCH", "OPTIONAL", "WHERE", "RETURN", "WITH", "UNWIND", "ORDER", "BY",
  "SKIP", "LIMIT", "DISTINCT", "AND", "OR", "XOR", "NOT", "IN", "AS",
  "STARTS", "ENDS", "CONTAINS", "IS", "NULL", "CASE", "WHEN", "THEN",
  "ELSE", "END", "UNION", "ALL", "EXISTS", "COUNT", "TRUE", "FALSE", "CALL",
]);

const TOKEN_RE =
  /('(?:[^'\\]|\\.)*')|("(?:[^"\\]|\\.)*")|(:\s*`?[A-Za-z_][A-Za-z0-9_]*`?)|(\b\d+(?:\.\d+)?\b)|([A-Za-z_][A-Za-z0-9_]*)|(\s+|.)/g;

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function highlightCypher(cypher: string): string {
  let html = "";
  for (const match of cypher.matchAll(TOKEN_RE)) {
    const [_, str1, str2, label, num, word, other] = match;
    if (str1 !== undefined || str2 !== undefined) {
      html += `<span class="cy-str">${escapeHtml(str1 ?? str2!)}</span>`;
    } else if (label !== undefined) {
      html += `<span class="cy-label">${escapeHtml(label)}</span>`;
    } else if (num !== undefined) {
      html += `<span class="cy-num">${escapeHtml(num)}</span>`;
    } else if (word !== undefined) {
      html += KEYWORDS.has(word.toUpperCase())
        ? `<span class="cy-kw">${escapeHtml(word)}</span>`
        : escapeHtml(word);
    } else {
      html += escapeHtml(other ?? "");
    }
  }
  return html;
}
