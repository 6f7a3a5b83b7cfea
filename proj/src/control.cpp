#include "shoplift/control.hpp"

namespace shoplift {

Json to_json(const ControlMessage& message) {
  Json j = {{"camera_id", message.camera_id}, {"version", message.version}, {"token", message.token}};
  j["threshold"] = message.threshold ? Json(*message.threshold) : Json(nullptr);
  j["model"] = message.model ? *message.model : Json(nullptr);
  return j;
}

ControlMessage control_message_from_json(const Json& j) {
  FieldReader r(j);
  ControlMessage m;
  m.camera_id = r.non_empty_string("camera_id");
  m.version = r.unsigned_integer("version");
  m.token = r.string("token");
  if (r.has("threshold")) {
    m.threshold = r.number("threshold");
  }
  if (r.has("model")) {
    m.model = r.at("model");
  }
  return m;
}

Json to_json(const ControlAck& ack) {
  Json j = {{"camera_id", ack.camera_id}, {"version", ack.version}, {"accepted", ack.accepted}};
  j["reason"] = ack.reason ? Json(*ack.reason) : Json(nullptr);
  return j;
}

ControlAck control_ack_from_json(const Json& j) {
  FieldReader r(j);
  ControlAck a;
  a.camera_id = r.non_empty_string("camera_id");
  a.version = r.unsigned_integer("version");
  a.accepted = r.boolean("accepted");
  a.reason = r.optional_string("reason");
  return a;
}

}  // namespace shoplift
