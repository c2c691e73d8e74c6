/**
 * Split a tweet text into plain/marked segments so the matched lexicon
 * terms can be highlighted. Matching is case-insensitive, tolerates any
 * whitespace inside a term, and only fires at non-letter boundaries so
 * "eg har" never lights up inside another word.
 */

export interface Segment {
  text: string;
  marked: boolean;
}

function escapeRegExp(s: string): string {
  return s.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}

function termPattern(term: string): RegExp {
  const body = term.trim().split(/\s+/).map(escapeRegExp).join("\\s+");
  return new RegExp(`(?<![\\p{L}\\p{N}])${body}(?![\\p{L}\\p{N}])`, "giu");
}

export function highlightSegments(text: string, terms: string[]): Segment[] {
  const ranges: Array<[number, number]> = [];
  for (const term of terms) {
    if (!term.trim()) continue;
    for (const match of text.matchAll(termPattern(term))) {
      ranges.push([match.index ?? 0, (match.index ?? 0) + match[0].length]);
    }
  }
  if (ranges.length === 0) {
    return text ? [{ text, marked: false }] : [];
  }
  ranges.sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  const merged: Array<[number, number]> = [ranges[0]];
  for (const [start, end] of ranges.slice(1)) {
    const last = merged[merged.length - 1];
    if (start <= last[1]) {
      last[1] = Math.max(last[1], end);
    } else {
      merged.push([start, end]);
    }
  }
  const segments: Segment[] = [];
  let cursor = 0;
  for (const [start, end] of merged) {
    if (start > cursor) segments.push({ text: text.slice(cursor, start), marked: false });
    segments.push({ text: text.slice(start, end), marked: true });
    cursor = end;
  }
  if (cursor < text.length) segments.push({ text: text.slice(cursor), marked: false });
  return segments;
}
