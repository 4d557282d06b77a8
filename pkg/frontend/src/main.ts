import { ApiClient } from "./api.js";
import { boot } from "./app.js";

const root = document.getElementById("app");
if (root !== null) {
  boot(root, new ApiClient());
}
