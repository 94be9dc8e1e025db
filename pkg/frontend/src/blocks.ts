// Pure presentation mappings: which reply fields render as which labeled
// blocks for each call kind, and display names for template badges.

import type { ReplyView } from './types.js';

export interface ReplyBlock {
  label: string;
  text: string;
}

// Field order per call kind; `code` is handled separately (copy-to-editor).
const BLOCK_ORDER: Record<string, string[]> = {
  general: ['rationale', 'summary', 'reflection'],
  r1: ['rationale', 'reflection'],
  r2: ['exploration', 'reflection'],
  r3: ['advice', 'reflection'],
  modify: ['rationale', 'reflection'],
  merge: ['rationale', 'reflection'],
};

const LABELS: Record<string, string> = {
  rationale: 'Rationale',
  summary: 'Summary',
  reflection: 'Reflection',
  exploration: 'Exploration',
  advice: 'Advice',
};

export function replyBlocks(reply: ReplyView, mode?: string): ReplyBlock[] {
  // Templated replies carry the key set of their parent mode.
  const kind = reply.call_kind === 'template' ? (mode ?? 'general') : reply.call_kind;
  const order = BLOCK_ORDER[kind] ?? Object.keys(reply.fields).filter((k) => k !== 'code');
  const blocks: ReplyBlock[] = [];
  for (const key of order) {
    const text = reply.fields[key];
    if (text !== undefined) {
      blocks.push({ label: LABELS[key] ?? key, text });
    }
  }
  return blocks;
}

const TEMPLATE_NAMES: Record<string, string> = {
  'r1-clarify-goal': 'Clarify Goal',
  'r1-define-core-concept': 'Define Core Concept',
  'r1-justify-detail-decisions': 'Justify Detail Decisions',
  'r2-conceptual-connections': 'Conceptual Connections',
  'r2-module-experience-relations': 'Module–Experience Relations',
  'r3-transform-creative-direction': 'Transform Creative Direction',
  'r3-reevaluate-shift-visual-style': 'Re-evaluate and Shift Visual Style',
};

export function templateName(templateId: string): string {
  const known = TEMPLATE_NAMES[templateId];
  if (known) return known;
  return templateId
    .replace(/^r\d-/, '')
    .split('-')
    .map((w) => w.charAt(0).toUpperCase() + w.slice(1))
    .join(' ');
}
