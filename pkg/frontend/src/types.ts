// Wire types mirroring the session-service JSON.

export type Mode = 'general' | 'r1' | 'r2' | 'r3';

export interface ReplyView {
  fields: Record<string, string>;
  raw: string;
  repaired: boolean;
  call_kind: string;
}

export interface TurnView {
  seq: number;
  mode: Mode;
  template_id: string | null;
  user_prompt: string;
  reply: ReplyView;
  created_at: number;
}

export interface NodeView {
  id: string;
  parent_ids: string[];
  kind: 'root' | 'collected' | 'modified' | 'merged' | 'spark';
  code: string;
  title: string;
  description: string;
  preview_asset: string | null;
  created_at: number;
}

export interface GraphView {
  active_id: string;
  nodes: NodeView[];
}

export interface SessionDoc {
  schema_version: number;
  session_id: string;
  created_at: number;
  active_id: string;
  nodes: Array<NodeView & { turns: TurnView[] }>;
}

export interface TurnResponse {
  decision: 'plain' | 'template_eligible';
  reply: ReplyView;
  template_id?: string;
}

export interface ActivateResponse {
  active_id: string;
  code: string;
  history: TurnView[];
}

export interface NodeMutationResponse {
  node: NodeView;
  active_id: string;
}

export interface TransformResponse {
  node: NodeView;
  reply: ReplyView;
  active_id: string;
}

export interface DeleteResponse {
  removed: number;
  active_id: string;
}

export interface SparkView {
  id: string;
  label: string;
  reference: string;
  preview_asset: string;
}
