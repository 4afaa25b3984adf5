// Survey definitions exactly as the service serializes them, plus
// wire lines captured from the service encoder for byte-level checks.

import { SurveyDefinition } from "../src/protocol.js";

export const SSQ_DEF: SurveyDefinition = {"id":"ssq","title":"Simulator sickness symptom checklist","administer_at":"PostSession","items":[{"prompt":"General discomfort","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Fatigue","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Boredom","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Drowsiness","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Headache","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Eyestrain","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Difficulty focusing","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Salivation increase/decrease","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Sweating","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Nausea","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Difficulty concentrating","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Mental depression","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Fullness of the head","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Blurred vision","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Dizziness with eyes open/closed","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Vertigo","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Visual flashbacks","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Faintness","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Breathing awareness","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Stomach awareness","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Loss of appetite","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Increase of appetite","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Desire to move bowels","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Confusion","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Burping","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Vomiting","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]},{"prompt":"Others","scale_min":0,"scale_max":3,"labels":["None","Slight","Moderate","Severe"]}]};

export const TLX_DEF: SurveyDefinition = {"id":"nasa-tlx","title":"Task load survey","administer_at":"PostBlock","items":[{"prompt":"How mentally demanding was the task?","scale_min":1,"scale_max":7},{"prompt":"How physically demanding was the task?","scale_min":1,"scale_max":7},{"prompt":"How hurried or rushed was the pace of the task?","scale_min":1,"scale_max":7},{"prompt":"How hard did you have to work to accomplish your level of performance?","scale_min":1,"scale_max":7},{"prompt":"How successful were you in accomplishing what you were asked to do?","scale_min":1,"scale_max":7},{"prompt":"How insecure, discouraged, irritated, stressed, and annoyed were you?","scale_min":1,"scale_max":7}]};

// encode() output of the service for these must match ours byte for byte
export const GOLDEN_LINES: string[] = [
  "{\"type\":\"hello\",\"role\":\"operator\"}\n",
  "{\"type\":\"hello\",\"role\":\"spectator\"}\n",
  "{\"type\":\"welcome\",\"catalog\":{\"environments\":[\"demo\"],\"leaderboard_modes\":[\"Real\",\"Fake\",\"Practice\"]},\"session_active\":false}\n",
  "{\"type\":\"command\",\"command_id\":3,\"kind\":\"AddNote\",\"payload\":{\"text\":\"dizzy\"}}\n",
  "{\"type\":\"command\",\"command_id\":9,\"kind\":\"SubmitSurvey\",\"payload\":{\"survey_id\":\"nasa-tlx\",\"answers\":[2,2,2,2,2,2]}}\n",
  "{\"type\":\"ack\",\"command_id\":3,\"ok\":true}\n",
  "{\"type\":\"ack\",\"command_id\":4,\"ok\":false,\"error\":\"read-only connection\"}\n",
  "{\"type\":\"ack\",\"command_id\":5,\"ok\":true,\"detail\":{\"lights_on\":false,\"trial_clock\":1.25}}\n",
  "{\"type\":\"error\",\"message\":\"say hello first\"}\n",
];

// a full snapshot as the service sends it (pending_survey omitted: null)
export const GOLDEN_SNAPSHOT_LINE: string = "{\"type\":\"snapshot\",\"seq\":7,\"session_id\":\"s1\",\"phase\":\"InTrial\",\"block_index\":0,\"trial_index\":2,\"trial_clock\":0.5,\"pose\":{\"x\":1.5,\"z\":-2.25,\"yaw\":90.5},\"fly\":{\"x\":0.125,\"y\":1.0,\"z\":0.25},\"lights_on\":false,\"sound_on\":true,\"walls_present\":true,\"bad_session\":false,\"last_trial\":{\"block_index\":0,\"trial_index\":1,\"t\":2.5,\"d\":0.5,\"score\":800,\"end_reason\":\"EndKey\"},\"leaderboard\":{\"mode\":\"Fake\",\"entries\":[{\"participant_id\":\"p1\",\"score\":800}],\"placement\":{\"score\":800,\"rank\":1,\"is_new_high\":true,\"below_board\":false,\"practice\":false}}}\n";
